"""Cadence summaries and Bland-Altman agreement."""

import math

import numpy as np
import pytest

from gaitcadence.analysis import (BoutInterval, bland_altman,
                                  bout_cadence_summary, validate_bouts)
from gaitcadence.errors import DataFormatError, ParameterError
from gaitcadence.ridge import CadenceTrace


def make_trace(cadence, dt=0.1, t0=0.0):
    cadence = np.asarray(cadence, dtype=float)
    times = t0 + dt * np.arange(cadence.size)
    return CadenceTrace(times=times, if_hz=cadence / 2.0, cadence_hz=cadence,
                        frame_dt=dt)


class TestBoutInterval:
    def test_rejects_reversed(self):
        with pytest.raises(ParameterError):
            BoutInterval(5.0, 5.0, 1)

    def test_rejects_unknown_label(self):
        with pytest.raises(ParameterError):
            BoutInterval(0.0, 1.0, 7)

    def test_validate_sorts(self):
        bouts = validate_bouts([BoutInterval(10.0, 20.0, 2),
                                BoutInterval(0.0, 5.0, 1)])
        assert [b.start_s for b in bouts] == [0.0, 10.0]

    def test_validate_rejects_overlap(self):
        with pytest.raises(ParameterError):
            validate_bouts([BoutInterval(0.0, 30.0, 1),
                            BoutInterval(20.0, 40.0, 2)])

    def test_touching_bouts_allowed(self):
        validate_bouts([BoutInterval(0.0, 10.0, 1), BoutInterval(10.0, 20.0, 2)])


class TestSummary:
    def test_constant_trace(self):
        trace = make_trace(np.full(50, 2.0))
        rows = bout_cadence_summary(trace, [BoutInterval(0.0, 5.0, 1)],
                                    location="wr")
        assert len(rows) == 1
        row = rows[0]
        assert row.mean_cadence_hz == pytest.approx(2.0)
        assert row.sd_cadence_hz == 0.0
        assert row.n_frames == 50
        assert row.location == "wr"
        assert row.label_name == "walking"

    def test_two_point_statistics(self):
        trace = make_trace([1.9, 2.1])
        rows = bout_cadence_summary(trace, [BoutInterval(0.0, 1.0, 1)])
        assert rows[0].mean_cadence_hz == pytest.approx(2.0)
        assert rows[0].sd_cadence_hz == pytest.approx(0.1)

    def test_label_without_frames_omitted(self):
        trace = make_trace(np.full(10, 2.0))  # covers [0, 1)
        rows = bout_cadence_summary(trace, [BoutInterval(0.0, 1.0, 1),
                                            BoutInterval(5.0, 6.0, 3)])
        assert [r.label for r in rows] == [1]

    def test_single_frame_sd_zero(self):
        trace = make_trace([2.2])
        rows = bout_cadence_summary(trace, [BoutInterval(0.0, 1.0, 2)])
        assert rows[0].sd_cadence_hz == 0.0
        assert rows[0].n_frames == 1

    def test_pooling_is_order_independent(self):
        rng = np.random.default_rng(31)
        cad = rng.uniform(1.5, 2.5, size=100)
        trace = make_trace(cad)
        bouts_a = [BoutInterval(0.0, 3.0, 1), BoutInterval(6.0, 10.0, 1)]
        bouts_b = [BoutInterval(6.0, 10.0, 1), BoutInterval(0.0, 3.0, 1)]
        row_a = bout_cadence_summary(trace, bouts_a)[0]
        row_b = bout_cadence_summary(trace, bouts_b)[0]
        assert row_a.mean_cadence_hz == row_b.mean_cadence_hz
        assert row_a.sd_cadence_hz == row_b.sd_cadence_hz

    def test_duration_tracks_frame_count(self):
        trace = make_trace(np.full(30, 2.0), dt=0.5)
        rows = bout_cadence_summary(trace, [BoutInterval(0.0, 100.0, 1)])
        assert rows[0].duration_s == pytest.approx(15.0)


class TestBlandAltman:
    def test_identical_traces(self):
        a = make_trace(np.full(20, 2.0))
        stats = bland_altman(a, a)
        assert stats.mean_diff == 0.0
        assert stats.sd_diff == 0.0
        assert stats.loa_low == 0.0 and stats.loa_high == 0.0
        assert stats.n == 20

    def test_constant_offset(self):
        base = np.linspace(1.8, 2.2, 40)
        a = make_trace(base)
        b = make_trace(base + 0.1)
        stats = bland_altman(a, b)
        assert stats.mean_diff == pytest.approx(-0.1)
        assert stats.sd_diff == pytest.approx(0.0, abs=1e-12)

    def test_four_point_hand_case(self):
        a = make_trace(np.array([2.1, 1.9, 2.3, 1.7]))
        b = make_trace(np.full(4, 2.0))
        stats = bland_altman(a, b)
        assert abs(stats.mean_diff - 0.0) < 1e-12
        assert abs(stats.sd_diff - math.sqrt(0.05)) < 1e-12
        assert abs(stats.loa_low - (-1.96 * math.sqrt(0.05))) < 1e-12
        assert abs(stats.loa_high - 1.96 * math.sqrt(0.05)) < 1e-12

    def test_antisymmetry(self):
        rng = np.random.default_rng(32)
        a = make_trace(rng.uniform(1.8, 2.2, 30))
        b = make_trace(rng.uniform(1.8, 2.2, 30))
        ab = bland_altman(a, b)
        ba = bland_altman(b, a)
        assert ab.mean_diff == pytest.approx(-ba.mean_diff)
        assert ab.sd_diff == pytest.approx(ba.sd_diff)
        assert (ab.loa_high - ab.loa_low) == pytest.approx(ba.loa_high - ba.loa_low)

    def test_disjoint_supports_rejected(self):
        a = make_trace(np.full(10, 2.0), t0=0.0)
        b = make_trace(np.full(10, 2.0), t0=100.0)
        with pytest.raises(DataFormatError):
            bland_altman(a, b)

    def test_resamples_to_coarser_grid(self):
        fine = make_trace(np.full(100, 2.0), dt=0.1)
        coarse = make_trace(np.full(10, 1.8), dt=1.0)
        stats = bland_altman(fine, coarse)
        assert stats.n == 10
        assert stats.mean_diff == pytest.approx(0.2)

    def test_ci_formulas(self):
        d = np.array([0.1, -0.1, 0.3, -0.3])
        a = make_trace(2.0 + d)
        b = make_trace(np.full(4, 2.0))
        stats = bland_altman(a, b)
        sd = math.sqrt(0.05)
        lo, hi = stats.mean_ci()
        assert lo == pytest.approx(-1.96 * sd / 2.0)
        assert hi == pytest.approx(1.96 * sd / 2.0)
        assert stats.loa_ci_margin() == pytest.approx(1.96 * sd * math.sqrt(3.0 / 4.0))
