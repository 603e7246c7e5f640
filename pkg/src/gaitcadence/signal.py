"""Signal containers, triaxial magnitude, and preprocessing primitives.

All operations in this module are pure: they never mutate their inputs and
return new containers, so concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StructuralError

VALID_LOCATIONS = ("wr", "hi", "la", "ra", "other")


@dataclass
class Signal:
    """Uniformly sampled real-valued time series.

    Sample ``k`` (zero-based) is taken at time ``t0 + k / fs``.
    """

    samples: np.ndarray
    fs: float
    t0: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise StructuralError("samples must be a non-empty 1-D sequence")
        if not self.fs > 0:
            raise ParameterError(f"sampling rate must be positive, got {self.fs}")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.fs

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.fs


@dataclass
class TriaxialRecord:
    """Three equal-length acceleration axes from one sensor."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    fs: float
    location: str = "other"

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        self.z = np.asarray(self.z, dtype=np.float64)
        if not (self.x.ndim == self.y.ndim == self.z.ndim == 1):
            raise StructuralError("axes must be 1-D sequences")
        if not (self.x.size == self.y.size == self.z.size):
            raise StructuralError(
                f"axis lengths differ: x={self.x.size} y={self.y.size} z={self.z.size}"
            )
        if self.x.size == 0:
            raise StructuralError("axes must be non-empty")
        if not self.fs > 0:
            raise ParameterError(f"sampling rate must be positive, got {self.fs}")
        if self.location not in VALID_LOCATIONS:
            raise ParameterError(
                f"unknown location {self.location!r}; expected one of {VALID_LOCATIONS}"
            )

    def __len__(self) -> int:
        return self.x.size


@dataclass
class Window:
    """Odd-length analysis window ``h`` and its sampled derivative ``dh``.

    Both arrays have ``2K + 1`` entries on the normalized support
    ``[-0.5, 0.5]``; the center sample equals 1 for ``h`` and 0 for ``dh``.
    """

    h: np.ndarray
    dh: np.ndarray
    K: int
    sigma: float

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.float64)
        self.dh = np.asarray(self.dh, dtype=np.float64)
        n = 2 * self.K + 1
        if self.K < 1:
            raise ParameterError(f"window half-length must be >= 1, got {self.K}")
        if self.h.shape != (n,) or self.dh.shape != (n,):
            raise StructuralError(f"window arrays must have length {n}")
        if not np.isclose(self.h[self.K], 1.0):
            raise StructuralError("window center sample must equal 1")

    def __len__(self) -> int:
        return self.h.size

    @property
    def span(self) -> int:
        return 2 * self.K + 1


def vector_magnitude(rec: TriaxialRecord) -> Signal:
    """Euclidean magnitude of the three axes, sample by sample."""
    mag = np.sqrt(rec.x**2 + rec.y**2 + rec.z**2)
    return Signal(mag, rec.fs)


def median_detrend(s: Signal, order: int | None = None) -> Signal:
    """Subtract a running-median baseline from the signal.

    The window holds ``order`` samples centered on each output sample
    (``ceil(order/2)`` at or left of center, ``floor(order/2)`` right of it)
    and shrinks to the in-range samples near the edges. Even-count medians
    average the two middle values. Default order is ``round(10 * fs)``.
    """
    if order is None:
        order = int(round(10.0 * s.fs))
    order = int(order)
    if order < 1:
        raise ParameterError(f"median order must be >= 1, got {order}")
    x = s.samples
    n = x.size
    if order > n:
        raise ParameterError(f"median order {order} exceeds signal length {n}")

    left = (order + 1) // 2 - 1  # samples strictly left of center
    right = order // 2  # samples strictly right of center
    med = np.empty(n)

    # Full windows cover centers left .. n-1-right; chunk to bound memory.
    windows = np.lib.stride_tricks.sliding_window_view(x, order)
    interior = med[left : n - right]
    step = max(1, 4_000_000 // order)
    for i in range(0, windows.shape[0], step):
        interior[i : i + step] = np.median(windows[i : i + step], axis=1)

    for k in range(left):
        med[k] = np.median(x[: k + right + 1])
    for k in range(n - right, n):
        med[k] = np.median(x[k - left :])

    return Signal(x - med, s.fs, s.t0)


def rectify(s: Signal) -> Signal:
    """Absolute value of every sample."""
    return Signal(np.abs(s.samples), s.fs, s.t0)


def gaussian_window(K: int, sigma: float) -> Window:
    """Sampled Gaussian window and its derivative on ``[-0.5, 0.5]``.

    ``h(k) = exp(-u_k^2 / (2 sigma^2))`` with ``u_k = k/(2K) - 0.5`` for
    ``k = 0 .. 2K`` (zero-based), and ``dh`` is the analytic derivative of the
    Gaussian with respect to ``u`` sampled on the same grid.
    """
    K = int(K)
    if K < 1:
        raise ParameterError(f"window half-length must be >= 1, got {K}")
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    u = np.arange(2 * K + 1) / (2.0 * K) - 0.5
    h = np.exp(-(u**2) / (2.0 * sigma**2))
    dh = -u * h / sigma**2
    return Window(h=h, dh=dh, K=K, sigma=sigma)
