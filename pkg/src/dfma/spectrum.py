"""One-sided frequency grid and per-sample amplitude spectra.

A sample tensor of shape ``(L, C, H, W)`` is reduced to a scalar series of
length ``L`` (one value per frame), optionally de-meaned and windowed, and
transformed with an unnormalized DFT evaluated on the non-negative bins
``k = 0..floor(L/2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ShapeError

REDUCTIONS = ("mean", "rms", "l1")
PREPROC_MODES = ("raw", "demean")
WINDOWS = ("rect", "hann")


@dataclass(frozen=True)
class FrequencyGrid:
    """Angular frequencies ``omega_k = 2*pi*k/L`` for ``k = 0..K``, ``K = L // 2``."""

    L: int
    K: int = field(init=False)
    omegas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise ParameterError(f"DFT length must be an integer >= 2, got {self.L!r}")
        L = int(self.L)
        K = L // 2
        omegas = 2.0 * np.pi * np.arange(K + 1) / L
        if L % 2 == 0:
            # the Nyquist bin is exactly pi, not 2*pi*K/L after rounding
            omegas[K] = np.pi
        omegas.setflags(write=False)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "omegas", omegas)

    @property
    def has_nyquist(self) -> bool:
        return self.L % 2 == 0

    def __len__(self):
        return self.K + 1


def build_grid(L: int) -> FrequencyGrid:
    return FrequencyGrid(L)


@dataclass(frozen=True)
class SampleTensor:
    """One sample: ``data`` has shape ``(L, C, H, W)``; ``label`` is optional."""

    data: np.ndarray
    label: object = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 4:
            raise ShapeError(f"sample tensor must have rank 4 (L, C, H, W), got shape {data.shape}")
        if data.size == 0:
            raise ShapeError(f"sample tensor has an empty axis: {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ShapeError("sample tensor contains non-finite values")
        object.__setattr__(self, "data", data)

    @property
    def dims(self) -> tuple:
        return self.data.shape

    @property
    def L(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class AmplitudeSpectrum:
    grid: FrequencyGrid
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.float64)
        if amps.shape != (self.grid.K + 1,):
            raise ShapeError(f"expected {self.grid.K + 1} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amps", amps)


def _frames(sample) -> np.ndarray:
    if isinstance(sample, SampleTensor):
        data = sample.data
    else:
        data = np.asarray(sample, dtype=np.float64)
        if data.ndim < 1 or data.shape[0] == 0:
            raise ShapeError(f"sample must have a leading temporal axis, got shape {data.shape}")
    return data.reshape(data.shape[0], -1)


def scalarize(sample, reduce: str = "mean") -> np.ndarray:
    """Collapse every frame of ``sample`` to one number.

    ``mean`` is the plain average over all non-temporal entries, ``rms`` the
    root-mean-square and ``l1`` the mean absolute value.
    """
    flat = _frames(sample)
    if reduce == "mean":
        return flat.mean(axis=1)
    if reduce == "rms":
        return np.sqrt(np.mean(flat * flat, axis=1))
    if reduce == "l1":
        return np.abs(flat).mean(axis=1)
    raise ParameterError(f"unknown reduction {reduce!r}; expected one of {REDUCTIONS}")


def preprocess_series(series, mode: str = "demean") -> np.ndarray:
    s = np.asarray(series, dtype=np.float64)
    if mode == "raw":
        return s.copy()
    if mode == "demean":
        return s - s.mean()
    raise ParameterError(f"unknown preprocessing mode {mode!r}; expected one of {PREPROC_MODES}")


def hann_window(L: int) -> np.ndarray:
    """Symmetric Hann window, ``0.5 * (1 - cos(2*pi*l/(L-1)))``."""
    if L < 2:
        raise ParameterError(f"Hann window needs L >= 2, got {L}")
    l = np.arange(L)
    w = 0.5 * (1.0 - np.cos(2.0 * np.pi * l / (L - 1)))
    # pin the analytically exact points that cos() only approximates
    w[0] = w[-1] = 0.0
    if L % 2 == 1:
        w[(L - 1) // 2] = 1.0
    return w


def apply_window(series, window: str = "rect") -> np.ndarray:
    s = np.asarray(series, dtype=np.float64)
    if window == "rect":
        return s.copy()
    if window == "hann":
        return s * hann_window(len(s))
    raise ParameterError(f"unknown window {window!r}; expected one of {WINDOWS}")


def _twiddles(L: int):
    m = np.arange(L)
    angle = 2.0 * np.pi * m / L
    return np.cos(angle), np.sin(angle)


def one_sided_dft(series, grid: FrequencyGrid) -> AmplitudeSpectrum:
    """Magnitudes of the unnormalized DFT on bins ``0..K``.

    Direct summation: the phase index ``k*l mod L`` is reduced in integers
    before the trig lookup so every twiddle is evaluated at an angle in
    ``[0, 2*pi)``.
    """
    s = np.asarray(series, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] != grid.L:
        raise ShapeError(f"series length {s.shape} does not match grid length L={grid.L}")
    L = grid.L
    cos_t, sin_t = _twiddles(L)
    idx = np.outer(np.arange(grid.K + 1), np.arange(L)) % L
    re = cos_t[idx] @ s
    im = -(sin_t[idx] @ s)
    return AmplitudeSpectrum(grid, np.hypot(re, im))


def amplitude_spectrum(sample, grid: FrequencyGrid | None = None, reduce: str = "mean",
                       mode: str = "demean", window: str = "rect") -> AmplitudeSpectrum:
    """scalarize -> preprocess -> window -> one-sided DFT."""
    series = scalarize(sample, reduce)
    if grid is None:
        grid = FrequencyGrid(len(series))
    series = apply_window(preprocess_series(series, mode), window)
    return one_sided_dft(series, grid)
