"""Time-frequency transforms: STFT, cepstral masking, and synchrosqueezing.

The frequency axis of every grid has ``M + 1`` bins; bin ``m`` (zero-based)
maps to ``m * fs / (2M)`` Hz. Frames advance by ``hop`` samples, so frame
``n`` (zero-based) sits at time ``t0 + n * hop / fs``. All transforms are
pure and frames are independent, so callers may parallelize over time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import ParameterError, StructuralError
from .signal import Signal, Window

# Grid kinds, in pipeline order.
KIND_STFT = "stft"
KIND_STCT = "stct"
KIND_ISTCT = "istct-mask"
KIND_DSSTFT = "dsstft"
KIND_SST = "sst"
KIND_DSSST = "dssst"

_CHUNK_FRAMES = 512


@dataclass
class TFRGrid:
    """Time-frequency matrix with its axis metadata.

    ``values`` is ``(n_frames, fft_half + 1)``, complex for stft/dsstft and
    their squeezed forms, real for stct and the istct mask.
    """

    values: np.ndarray
    fs: float
    fft_half: int
    hop: int = 1
    kind: str = KIND_STFT
    t0: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 2:
            raise StructuralError("grid values must be a 2-D matrix")
        if self.values.shape[1] != self.fft_half + 1:
            raise StructuralError(
                f"grid has {self.values.shape[1]} columns, expected fft_half+1="
                f"{self.fft_half + 1}"
            )
        if self.hop < 1:
            raise ParameterError(f"hop must be >= 1, got {self.hop}")
        if not self.fs > 0:
            raise ParameterError(f"sampling rate must be positive, got {self.fs}")

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def freqs_hz(self) -> np.ndarray:
        return np.arange(self.fft_half + 1) * self.fs / (2.0 * self.fft_half)

    @property
    def frame_times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_frames) * self.hop / self.fs

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def bin_of_hz(self, hz: float) -> int:
        """Nearest frequency bin (zero-based) for a physical frequency."""
        return int(round(hz * 2.0 * self.fft_half / self.fs))


@dataclass
class OmegaMatrix:
    """Per-cell instantaneous-frequency estimates in zero-based bin units.

    Cells whose source magnitude did not exceed the threshold hold ``-inf``
    and are skipped by the squeezing step.
    """

    values: np.ndarray
    upsilon: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise StructuralError("operator values must be a 2-D matrix")

    @property
    def finite_mask(self) -> np.ndarray:
        return np.isfinite(self.values)


def frame_starts(n_samples: int, hop: int) -> np.ndarray:
    """Zero-based sample index of each analysis frame."""
    if hop < 1:
        raise ParameterError(f"hop must be >= 1, got {hop}")
    return np.arange(0, n_samples, hop)


def _windowed_rows(padded: np.ndarray, taper: np.ndarray, fft_half: int,
                   starts: np.ndarray) -> np.ndarray:
    """DFT rows of the tapered frames starting at ``starts`` in ``padded``."""
    segs = np.lib.stride_tricks.sliding_window_view(padded, taper.size)[starts]
    return scipy.fft.rfft(segs * taper, n=2 * fft_half, axis=1, workers=-1)


def stft(s: Signal, w: Window, fft_half: int, hop: int = 1,
         derivative: bool = False) -> TFRGrid:
    """Short-time Fourier transform with hop-1 default framing.

    Frame ``n`` covers samples ``n*hop - K .. n*hop + K`` (zero-extended past
    the ends) tapered by ``w.h`` (or ``w.dh`` when ``derivative``), then
    transformed with a ``2 * fft_half``-point DFT; only the ``fft_half + 1``
    nonnegative-frequency bins are kept. The DFT phase is referenced to the
    window start, matching a plain zero-padded FFT of each tapered frame.
    """
    fft_half = int(fft_half)
    if 2 * fft_half < w.span:
        raise ParameterError(
            f"DFT length {2 * fft_half} shorter than window span {w.span}"
        )
    taper = w.dh if derivative else w.h
    x = s.samples
    starts = frame_starts(x.size, hop)
    padded = np.concatenate([np.zeros(w.K), x, np.zeros(w.K)])
    out = np.empty((starts.size, fft_half + 1), dtype=np.complex128)
    for i in range(0, starts.size, _CHUNK_FRAMES):
        sel = starts[i : i + _CHUNK_FRAMES]
        out[i : i + sel.size] = _windowed_rows(padded, taper, fft_half, sel)
    return TFRGrid(out, fs=s.fs, fft_half=fft_half, hop=hop, kind=KIND_STFT,
                   t0=s.t0)


def _stct_rows(stft_mag: np.ndarray, gamma: float) -> np.ndarray:
    """Cepstral rows of one block of STFT magnitudes (already nonnegative)."""
    powered = stft_mag**gamma
    # DFT of the even spectrum extension equals a type-I DCT of the half rows.
    ceps = scipy.fft.dct(powered, type=1, axis=1, workers=-1)
    return np.maximum(ceps, 0.0)


def stct(v: TFRGrid, gamma: float) -> TFRGrid:
    """Short-time cepstral transform of an STFT grid.

    Per frame, a soft-log power ``|V|^gamma`` is rebuilt across the full
    ``2M``-point spectrum by conjugate symmetry (real input signal) and
    Fourier-transformed; the real part is kept on the first ``M + 1``
    quefrency columns with negatives clamped to zero.
    """
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    vals = _stct_rows(np.abs(v.values), gamma)
    return TFRGrid(vals, fs=v.fs, fft_half=v.fft_half, hop=v.hop,
                   kind=KIND_STCT, t0=v.t0)


def _istct_interp_table(fft_half: int):
    """Precomputed gather table mapping quefrency columns to frequency bins.

    For frequency bin ``m`` the mask evaluates the cepstral row at abscissa
    ``m / (2M)`` by linear interpolation over the nodes ``1/j`` (j = 1..M),
    where node ``1/j`` carries quefrency column ``j``. Queries below ``1/M``
    (bins 0 and 1) evaluate to zero.
    """
    M = fft_half
    x = np.arange(M + 1) / (2.0 * M)
    nodes = 1.0 / np.arange(M, 0, -1)  # ascending: 1/M .. 1
    idx = np.searchsorted(nodes, x, side="right") - 1
    valid = x >= nodes[0]
    idx = np.clip(idx, 0, M - 2)
    span = nodes[idx + 1] - nodes[idx]
    weight = np.where(valid, (x - nodes[idx]) / span, 0.0)
    col_lo = M - idx  # quefrency column at nodes[idx]
    col_hi = col_lo - 1
    return valid, col_lo, col_hi, weight


def _istct_rows(ceps: np.ndarray, fft_half: int) -> np.ndarray:
    valid, col_lo, col_hi, weight = _istct_interp_table(fft_half)
    u = ceps[:, col_lo] * (1.0 - weight) + ceps[:, col_hi] * weight
    u[:, ~valid] = 0.0
    return u


def istct(c: TFRGrid) -> TFRGrid:
    """Resample quefrency rows onto the frequency axis (de-shape mask).

    Exploits the reciprocal relation between period and frequency: the value
    at frequency bin ``m`` is the cepstrum at the matching period, linearly
    interpolated between the known quefrency nodes. The result is a
    nonnegative mask that retains the fundamental frequency and its divisors.
    """
    if c.fft_half < 2:
        raise StructuralError("istct needs at least 3 quefrency columns")
    vals = _istct_rows(c.values, c.fft_half)
    return TFRGrid(vals, fs=c.fs, fft_half=c.fft_half, hop=c.hop,
                   kind=KIND_ISTCT, t0=c.t0)


def deshape(v: TFRGrid, u: TFRGrid) -> TFRGrid:
    """Pointwise product of the STFT with the de-shape mask."""
    if v.values.shape != u.values.shape:
        raise StructuralError(
            f"shape mismatch: stft {v.values.shape} vs mask {u.values.shape}"
        )
    return TFRGrid(v.values * u.values, fs=v.fs, fft_half=v.fft_half,
                   hop=v.hop, kind=KIND_DSSTFT, t0=v.t0)


def _omega_rows(v_rows: np.ndarray, vd_rows: np.ndarray, upsilon: float,
                window_half: int, fft_half: int) -> np.ndarray:
    mask = np.abs(v_rows) > upsilon
    ratio = np.zeros_like(v_rows)
    np.divide(vd_rows, v_rows, out=ratio, where=mask)
    scale = 2.0 * fft_half / (2.0 * np.pi * (2 * window_half + 1))
    cols = np.arange(v_rows.shape[1], dtype=np.float64)
    omega = cols[None, :] - ratio.imag * scale
    omega[~mask] = -np.inf
    return omega


def reassignment_operator(v: TFRGrid, vd: TFRGrid, upsilon: float,
                          window_half: int) -> OmegaMatrix:
    """Frequency reassignment rule from the window / derivative STFT pair.

    Where ``|V| > upsilon`` the cell holds the local instantaneous-frequency
    estimate in zero-based bin units: the cell's own bin index plus the
    phase-derived correction ``-Im(V'/V)`` scaled by ``2M / (2 pi (2K+1))``.
    Cells at or below the threshold hold ``-inf`` and carry no energy.
    """
    if v.values.shape != vd.values.shape:
        raise StructuralError(
            f"shape mismatch: V {v.values.shape} vs V' {vd.values.shape}"
        )
    if not upsilon > 0:
        raise ParameterError(f"upsilon must be positive, got {upsilon}")
    omega = _omega_rows(v.values, vd.values, upsilon, window_half, v.fft_half)
    return OmegaMatrix(omega, upsilon=upsilon)


def _squeeze_rows(src_rows: np.ndarray, omega_rows: np.ndarray,
                  fft_half: int) -> np.ndarray:
    """Reassign each row's energy to the rounded target bins."""
    n_rows, width = src_rows.shape
    finite = np.isfinite(omega_rows)
    rows, cols = np.nonzero(finite)
    targets = np.rint(omega_rows[rows, cols]).astype(np.int64)
    keep = (targets >= 0) & (targets <= fft_half)
    rows, cols, targets = rows[keep], cols[keep], targets[keep]
    flat = rows * width + targets
    weights = src_rows[rows, cols]
    size = n_rows * width
    if np.iscomplexobj(src_rows):
        out = (np.bincount(flat, weights=weights.real, minlength=size)
               + 1j * np.bincount(flat, weights=weights.imag, minlength=size))
    else:
        out = np.bincount(flat, weights=weights, minlength=size)
    return out.reshape(n_rows, width)


def synchrosqueeze(src: TFRGrid, omega: OmegaMatrix,
                   squared: bool = False) -> TFRGrid:
    """Sharpen a TFR by moving each cell's value to its reassigned bin.

    The target column is ``round(omega)`` (zero-based); out-of-range targets
    are discarded and ``-inf`` cells contribute nothing. By default the
    complex values are summed; ``squared=True`` squeezes ``|src|^2`` instead.
    """
    if src.values.shape != omega.values.shape:
        raise StructuralError(
            f"shape mismatch: src {src.values.shape} vs omega {omega.values.shape}"
        )
    vals = np.abs(src.values) ** 2 if squared else src.values
    out = _squeeze_rows(vals, omega.values, src.fft_half)
    kind = KIND_DSSST if src.kind == KIND_DSSTFT else KIND_SST
    return TFRGrid(out, fs=src.fs, fft_half=src.fft_half, hop=src.hop,
                   kind=kind, t0=src.t0)
