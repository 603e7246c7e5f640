"""Penalized ridge extraction and conversion to cadence units."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StructuralError
from .tfr import TFRGrid

logger = logging.getLogger(__name__)

ZERO_FLOOR_FRACTION = 1e-12


@dataclass
class RidgeCurve:
    """Maximum-energy curve through a TFR block.

    ``bins`` holds one zero-based frequency-bin index per frame of the
    extracted span; ``frame_lo`` is the zero-based row of the first frame.
    ``band`` is the inclusive (low, high) bin range the search was
    restricted to. ``degenerate`` marks an all-zero input block, for which
    the constant lowest-bin curve is returned.
    """

    bins: np.ndarray
    frame_lo: int
    band: tuple[int, int]
    penalty: float
    objective: float
    degenerate: bool = False

    def __post_init__(self):
        self.bins = np.asarray(self.bins, dtype=np.int64)
        lo, hi = self.band
        if self.bins.size < 1:
            raise StructuralError("ridge must cover at least one frame")
        if self.bins.min() < lo or self.bins.max() > hi:
            raise StructuralError("ridge leaves its search band")

    def __len__(self) -> int:
        return self.bins.size


@dataclass
class CadenceTrace:
    """Per-frame instantaneous frequency and cadence in physical units."""

    times: np.ndarray
    if_hz: np.ndarray
    cadence_hz: np.ndarray
    frame_dt: float

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.if_hz = np.asarray(self.if_hz, dtype=np.float64)
        self.cadence_hz = np.asarray(self.cadence_hz, dtype=np.float64)
        if not (self.times.size == self.if_hz.size == self.cadence_hz.size):
            raise StructuralError("trace arrays must have equal length")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise StructuralError("trace times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.size


def ridge_dp(mag: np.ndarray, penalty: float):
    """Exact penalized-ridge dynamic program over a magnitude block.

    Maximizes ``sum_t log(mag[t, c(t)] / Z) - penalty * sum |c(t)-c(t-1)|^2``
    where ``Z`` is the total magnitude of the block and zero cells are
    floored at ``1e-12 * Z`` before the log. Ties resolve to the lowest bin,
    front to back. Returns ``(bins, objective, degenerate)`` with ``bins``
    local to the block columns.

    O(T * B^2); intended for physically restricted bands (B up to a few
    hundred bins).
    """
    mag = np.asarray(mag, dtype=np.float64)
    if mag.ndim != 2 or mag.size == 0:
        raise StructuralError("ridge block must be a non-empty 2-D matrix")
    if penalty < 0:
        raise ParameterError(f"penalty must be >= 0, got {penalty}")
    T, B = mag.shape

    total = mag.sum()
    if total <= 0:
        return np.zeros(T, dtype=np.int64), -math.inf, True

    score = np.log(np.maximum(mag, ZERO_FLOOR_FRACTION * total)) - np.log(total)

    offsets = np.arange(B, dtype=np.float64)
    jump = penalty * (offsets[:, None] - offsets[None, :]) ** 2

    # Backward accumulation so the forward reconstruction can break ties
    # toward the lowest bin at every frame starting from the first.
    suffix = np.empty_like(score)
    suffix[-1] = score[-1]
    for t in range(T - 2, -1, -1):
        suffix[t] = score[t] + np.max(suffix[t + 1][None, :] - jump, axis=1)

    bins = np.empty(T, dtype=np.int64)
    bins[0] = int(np.argmax(suffix[0]))
    for t in range(1, T):
        cand = suffix[t] - penalty * (offsets - bins[t - 1]) ** 2
        bins[t] = int(np.argmax(cand))

    objective = float(score[np.arange(T), bins].sum()
                      - penalty * np.sum(np.diff(bins).astype(np.float64) ** 2))
    return bins, objective, False


def band_to_bins(band_hz, fs: float, fft_half: int) -> tuple[int, int]:
    """Inclusive zero-based bin range covering a physical frequency band."""
    if band_hz is None:
        return 0, fft_half
    lo_hz, hi_hz = band_hz
    if hi_hz < lo_hz:
        raise ParameterError(f"band is inverted: {band_hz}")
    lo = max(0, math.ceil(lo_hz * 2.0 * fft_half / fs - 1e-9))
    hi = min(fft_half, math.floor(hi_hz * 2.0 * fft_half / fs + 1e-9))
    if lo > hi:
        raise ParameterError(f"band {band_hz} Hz maps to no frequency bins")
    return lo, hi


def extract_ridge(tfr: TFRGrid, frame_lo: int = 0, frame_hi: int | None = None,
                  band_hz=None, penalty: float = 1.0) -> RidgeCurve:
    """Extract the penalized maximum-energy curve from a TFR.

    Frames ``frame_lo .. frame_hi`` (half-open, zero-based; ``None`` means
    the end) are searched within ``band_hz = (low, high)`` in Hz (``None``
    searches all bins). An all-zero block yields a ``degenerate`` curve at
    the lowest band bin instead of raising.
    """
    if frame_hi is None:
        frame_hi = tfr.n_frames
    if not (0 <= frame_lo < frame_hi <= tfr.n_frames):
        raise ParameterError(
            f"frame range [{frame_lo}, {frame_hi}) invalid for {tfr.n_frames} frames"
        )
    lo_bin, hi_bin = band_to_bins(band_hz, tfr.fs, tfr.fft_half)
    block = np.abs(tfr.values[frame_lo:frame_hi, lo_bin : hi_bin + 1])
    bins, objective, degenerate = ridge_dp(block, penalty)
    if degenerate:
        logger.warning(
            "ridge block is all zero over frames [%d, %d); returning the "
            "constant lowest-bin curve", frame_lo, frame_hi,
        )
    return RidgeCurve(bins=bins + lo_bin, frame_lo=frame_lo,
                      band=(lo_bin, hi_bin), penalty=penalty,
                      objective=objective, degenerate=degenerate)


def cadence_from_ridge(r: RidgeCurve, fs: float, fft_half: int, hop: int = 1,
                       t0: float = 0.0) -> CadenceTrace:
    """Convert a bin-index ridge to instantaneous frequency and cadence.

    Bin ``c`` (zero-based) maps to ``c * fs / (2M)`` Hz; the cadence is twice
    the instantaneous frequency (two steps per stride cycle).
    """
    if_hz = r.bins * fs / (2.0 * fft_half)
    cadence = 2.0 * if_hz
    frame_dt = hop / fs
    times = t0 + (r.frame_lo + np.arange(r.bins.size)) * frame_dt
    return CadenceTrace(times=times, if_hz=if_hz, cadence_hz=cadence,
                        frame_dt=frame_dt)
