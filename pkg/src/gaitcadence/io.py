"""File ingestion and export: CSV loaders, trace/summary writers, TFR dumps."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from .analysis import BAStats, BoutInterval, validate_bouts
from .errors import DataFormatError, ParameterError
from .ridge import CadenceTrace
from .signal import TriaxialRecord
from .tfr import TFRGrid

logger = logging.getLogger(__name__)

UNIFORMITY_TOL = 0.01  # sampling intervals may deviate 1% from their median
PGM_QUANTILE = 0.99

_FLOAT_FMT = "{:.12g}"


def _fmt(x: float) -> str:
    return _FLOAT_FMT.format(x)


def load_triaxial_csv(path, fs_hint: float | None = None,
                      location: str = "other") -> TriaxialRecord:
    """Load a ``t,x,y,z`` (or ``x,y,z`` plus ``fs_hint``) CSV file.

    With a time column the sampling rate is the reciprocal of the median
    interval, and every interval must stay within 1% of that median.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty") from None
        names = [h.strip().lower() for h in header]
        if names == ["t", "x", "y", "z"]:
            has_time = True
        elif names == ["x", "y", "z"]:
            has_time = False
            if fs_hint is None:
                raise DataFormatError(
                    f"{path}: no time column; a sampling rate is required"
                )
        else:
            raise DataFormatError(
                f"{path}: expected header 't,x,y,z' or 'x,y,z', got {','.join(names)!r}"
            )
        ncol = 4 if has_time else 3
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != ncol:
                raise DataFormatError(
                    f"{path}:{lineno}: expected {ncol} columns, got {len(row)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: non-numeric value in {row!r}"
                ) from None
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    data = np.asarray(rows)
    if has_time:
        t = data[:, 0]
        dt = np.diff(t)
        if dt.size == 0:
            if fs_hint is None:
                raise DataFormatError(
                    f"{path}: single row; a sampling rate is required"
                )
            fs = fs_hint
        else:
            med = float(np.median(dt))
            if med <= 0:
                raise DataFormatError(f"{path}: time column is not increasing")
            if np.any(np.abs(dt - med) > UNIFORMITY_TOL * med):
                raise DataFormatError(
                    f"{path}: sampling is non-uniform beyond "
                    f"{UNIFORMITY_TOL:.0%} of the median interval"
                )
            fs = 1.0 / med
        xyz = data[:, 1:]
    else:
        fs = fs_hint
        xyz = data
    return TriaxialRecord(x=xyz[:, 0], y=xyz[:, 1], z=xyz[:, 2], fs=fs,
                          location=location)


def write_triaxial_csv(path, rec: TriaxialRecord, t0: float = 0.0):
    path = Path(path)
    t = t0 + np.arange(len(rec)) / rec.fs
    with path.open("w", newline="") as fh:
        fh.write("t,x,y,z\n")
        for ti, xi, yi, zi in zip(t, rec.x, rec.y, rec.z):
            fh.write(f"{_fmt(ti)},{_fmt(xi)},{_fmt(yi)},{_fmt(zi)}\n")


def load_labels_csv(path) -> list[BoutInterval]:
    """Load ``start_s,end_s,label`` rows into a validated, sorted bout list."""
    path = Path(path)
    bouts = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty") from None
        names = [h.strip().lower() for h in header]
        if names != ["start_s", "end_s", "label"]:
            raise DataFormatError(
                f"{path}: expected header 'start_s,end_s,label', got "
                f"{','.join(names)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise DataFormatError(
                    f"{path}:{lineno}: expected 3 columns, got {len(row)}"
                )
            try:
                start, end, label = float(row[0]), float(row[1]), int(row[2])
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: non-numeric value in {row!r}"
                ) from None
            try:
                bouts.append(BoutInterval(start, end, label))
            except ParameterError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
    try:
        return validate_bouts(bouts)
    except ParameterError as exc:
        raise DataFormatError(f"{path}: {exc}") from None


def write_labels_csv(path, bouts):
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("start_s,end_s,label\n")
        for b in bouts:
            fh.write(f"{_fmt(b.start_s)},{_fmt(b.end_s)},{b.label}\n")


def check_bout_spans(bouts, window_span_s: float) -> list[str]:
    """Warnings for bouts shorter than the analysis window span."""
    warnings = []
    for b in bouts:
        span = b.end_s - b.start_s
        if span < window_span_s:
            warnings.append(
                f"bout [{_fmt(b.start_s)}, {_fmt(b.end_s)}] spans {_fmt(span)} s, "
                f"shorter than the {_fmt(window_span_s)} s analysis window"
            )
    return warnings


def write_trace_csv(path, trace: CadenceTrace, labels: np.ndarray):
    """Write a cadence trace with its per-frame bout label."""
    path = Path(path)
    labels = np.asarray(labels)
    if labels.size != len(trace):
        raise ParameterError("labels must have one entry per trace frame")
    with path.open("w", newline="") as fh:
        fh.write("time_s,if_hz,cadence_hz,bout_label\n")
        for t, f, c, lab in zip(trace.times, trace.if_hz, trace.cadence_hz, labels):
            fh.write(f"{_fmt(t)},{_fmt(f)},{_fmt(c)},{int(lab)}\n")


def load_trace_csv(path) -> tuple[CadenceTrace, np.ndarray]:
    """Read back a cadence trace CSV; returns the trace and its labels."""
    path = Path(path)
    times, if_hz, cadence, labels = [], [], [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty") from None
        if [h.strip().lower() for h in header] != ["time_s", "if_hz",
                                                   "cadence_hz", "bout_label"]:
            raise DataFormatError(f"{path}: unexpected trace header")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataFormatError(
                    f"{path}:{lineno}: expected 4 columns, got {len(row)}"
                )
            try:
                times.append(float(row[0]))
                if_hz.append(float(row[1]))
                cadence.append(float(row[2]))
                labels.append(int(row[3]))
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: non-numeric value in {row!r}"
                ) from None
    if not times:
        raise DataFormatError(f"{path}: no data rows")
    times = np.asarray(times)
    dts = np.diff(times)
    frame_dt = float(np.median(dts)) if dts.size else 1.0
    trace = CadenceTrace(times=times, if_hz=np.asarray(if_hz),
                         cadence_hz=np.asarray(cadence), frame_dt=frame_dt)
    return trace, np.asarray(labels, dtype=int)


def write_summary_csv(path, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("location,label,activity,mean_cadence_hz,sd_cadence_hz,"
                 "n_frames,duration_s\n")
        for r in rows:
            fh.write(f"{r.location},{r.label},{r.label_name},"
                     f"{_fmt(r.mean_cadence_hz)},{_fmt(r.sd_cadence_hz)},"
                     f"{r.n_frames},{_fmt(r.duration_s)}\n")


def write_bland_altman_csv(path, stats: BAStats, with_ci: bool = False):
    path = Path(path)
    with path.open("w", newline="") as fh:
        header = "mean_diff,sd_diff,loa_low,loa_high,n"
        row = (f"{_fmt(stats.mean_diff)},{_fmt(stats.sd_diff)},"
               f"{_fmt(stats.loa_low)},{_fmt(stats.loa_high)},{stats.n}")
        if with_ci:
            lo, hi = stats.mean_ci()
            margin = stats.loa_ci_margin()
            header += ",mean_ci_low,mean_ci_high,loa_ci_margin"
            row += f",{_fmt(lo)},{_fmt(hi)},{_fmt(margin)}"
        fh.write(header + "\n" + row + "\n")


TFR_FORMATS = ("csv", "pgm", "f64le")


def export_tfr(tfr: TFRGrid, path, fmt: str = "csv"):
    """Export a TFR magnitude matrix.

    ``csv``: '#'-prefixed metadata header then one row per frame.
    ``pgm``: binary 8-bit grayscale heatmap, frequency down the rows with the
    highest bin on top, intensities clipped at the 99% magnitude quantile.
    ``f64le``: one JSON metadata line then the raw little-endian float64
    matrix, row-major.
    """
    path = Path(path)
    if fmt not in TFR_FORMATS:
        raise ParameterError(f"unknown TFR format {fmt!r}; expected {TFR_FORMATS}")
    mag = tfr.magnitude().astype(np.float64)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            fh.write(f"# kind={tfr.kind} fs={_fmt(tfr.fs)} fft_half={tfr.fft_half} "
                     f"hop={tfr.hop} t0={_fmt(tfr.t0)} n_frames={mag.shape[0]}\n")
            fh.write("# columns: frequency bins 0..M at m*fs/(2M) Hz; "
                     "rows: frames\n")
            for row in mag:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    elif fmt == "pgm":
        q = float(np.quantile(mag, PGM_QUANTILE))
        if q <= 0:
            img = np.zeros(mag.shape, dtype=np.uint8)
        else:
            img = np.round(255.0 * np.minimum(mag, q) / q).astype(np.uint8)
        img = img.T[::-1, :]  # rows = frequency, top row = highest bin
        with path.open("wb") as fh:
            fh.write(f"P5 {img.shape[1]} {img.shape[0]} 255\n".encode("ascii"))
            fh.write(img.tobytes())
    else:
        meta = {"n_frames": int(mag.shape[0]), "n_bins": int(mag.shape[1]),
                "fs": tfr.fs, "fft_half": tfr.fft_half, "hop": tfr.hop,
                "t0": tfr.t0, "kind": tfr.kind, "dtype": "<f8"}
        with path.open("wb") as fh:
            fh.write((json.dumps(meta, sort_keys=True) + "\n").encode("ascii"))
            fh.write(mag.astype("<f8").tobytes())


def read_tfr_f64le(path) -> tuple[np.ndarray, dict]:
    """Read back a matrix written by ``export_tfr(..., fmt='f64le')``."""
    path = Path(path)
    with path.open("rb") as fh:
        meta = json.loads(fh.readline().decode("ascii"))
        raw = fh.read()
    mat = np.frombuffer(raw, dtype="<f8").reshape(meta["n_frames"], meta["n_bins"])
    return mat.copy(), meta
