"""Per-bin Fisher-style discriminative index over the one-sided grid.

Each bin's amplitude is treated as an independent scalar feature. With class
priors ``pi_c``, class means ``mu_c`` and unbiased class variances ``var_c``::

    sb = sum_c pi_c * (mu_c - mu_bar)**2
    sw = sum_c pi_c * var_c
    di = sb / (sw + eps)

and ``di_norm = di / sum(di)`` is a PMF over the bins.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as _stats

from .errors import DegenerateClassError, NoDiscriminationError, ParameterError, ShapeError
from .spectrum import AmplitudeSpectrum, FrequencyGrid, amplitude_spectrum

DEFAULT_EPSILON = 1e-12


@dataclass(frozen=True)
class ClassStats:
    grid: FrequencyGrid
    classes: tuple
    counts: np.ndarray   # (C,)
    priors: np.ndarray   # (C,)
    mu: np.ndarray       # (C, K+1)
    var: np.ndarray      # (C, K+1), unbiased

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def mixture_mean(self) -> np.ndarray:
        return self.priors @ self.mu


@dataclass(frozen=True)
class DiSpectrum:
    grid: FrequencyGrid
    di: np.ndarray
    di_norm: np.ndarray
    epsilon: float

    def to_dict(self) -> dict:
        return {
            "L": self.grid.L,
            "epsilon": float(self.epsilon),
            "di": [float(v) for v in self.di],
            "di_norm": [float(v) for v in self.di_norm],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "DiSpectrum":
        try:
            grid = FrequencyGrid(int(doc["L"]))
            di = np.asarray(doc["di"], dtype=np.float64)
            di_norm = np.asarray(doc["di_norm"], dtype=np.float64)
            eps = float(doc["epsilon"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed DI document: {exc}") from exc
        if di.shape != (grid.K + 1,) or di_norm.shape != (grid.K + 1,):
            raise ShapeError(f"DI arrays must have {grid.K + 1} entries for L={grid.L}")
        if np.any(di_norm < 0) or abs(di_norm.sum() - 1.0) > 1e-9:
            raise ShapeError("di_norm is not a probability mass function")
        return cls(grid, di, di_norm, eps)

    @classmethod
    def from_json(cls, text: str) -> "DiSpectrum":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ShapeError(f"DI file is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def from_pmf(cls, di_norm, epsilon: float = DEFAULT_EPSILON) -> "DiSpectrum":
        """Wrap a bare PMF over ``K+1`` bins; the grid length is taken as even ``2K``."""
        p = np.asarray(di_norm, dtype=np.float64)
        grid = FrequencyGrid(2 * (len(p) - 1))
        return cls(grid, p.copy(), p / p.sum(), epsilon)


def class_statistics(spectra: Sequence[AmplitudeSpectrum], labels: Sequence) -> ClassStats:
    if len(spectra) != len(labels):
        raise ShapeError(f"{len(spectra)} spectra but {len(labels)} labels")
    if not spectra:
        raise DegenerateClassError("no samples given")
    grid = spectra[0].grid
    for s in spectra:
        if s.grid.L != grid.L:
            raise ShapeError(f"mixed grids: L={grid.L} and L={s.grid.L}")
    amps = np.stack([s.amps for s in spectra])
    labels = list(labels)
    classes = tuple(sorted(set(labels), key=_label_key))
    lab = np.array([classes.index(y) for y in labels])
    counts = np.bincount(lab, minlength=len(classes))
    short = [c for c, n in zip(classes, counts) if n < 2]
    if short:
        raise DegenerateClassError(f"classes with fewer than 2 samples: {short}")
    mu = np.stack([amps[lab == c].mean(axis=0) for c in range(len(classes))])
    var = np.stack([amps[lab == c].var(axis=0, ddof=1) for c in range(len(classes))])
    priors = counts / counts.sum()
    return ClassStats(grid, classes, counts, priors, mu, var)


def _label_key(y):
    # ints sort numerically, everything else by string
    return (0, y, "") if isinstance(y, (int, np.integer)) else (1, 0, str(y))


def scatters(stats: ClassStats):
    mu_bar = stats.priors @ stats.mu
    sb = stats.priors @ (stats.mu - mu_bar) ** 2
    sw = stats.priors @ stats.var
    return sb, sw


def di_spectrum(stats: ClassStats, epsilon: float = DEFAULT_EPSILON) -> DiSpectrum:
    if not epsilon > 0 or not np.isfinite(epsilon):
        raise ParameterError(f"epsilon must be a positive finite number, got {epsilon!r}")
    sb, sw = scatters(stats)
    di = sb / (sw + epsilon)
    total = di.sum()
    if not total > 0:
        raise NoDiscriminationError(
            "between-class scatter is zero at every bin; class means coincide")
    return DiSpectrum(stats.grid, di, di / total, float(epsilon))


def compute_di(samples, labels, *, reduce: str = "mean", mode: str = "demean",
               window: str = "rect", epsilon: float = DEFAULT_EPSILON) -> DiSpectrum:
    """Full pipeline from sample tensors to a DI spectrum.

    ``samples`` must come from the training split only.
    """
    samples = list(samples)
    if not samples:
        raise DegenerateClassError("no samples given")
    grid = FrequencyGrid(np.shape(getattr(samples[0], "data", samples[0]))[0])
    spectra = [amplitude_spectrum(x, grid, reduce, mode, window) for x in samples]
    return di_spectrum(class_statistics(spectra, labels), epsilon)


def js_divergence(p, q) -> float:
    """Jensen-Shannon divergence in bits, with ``0 * log 0 = 0``."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    p = p / p.sum()
    q = q / q.sum()
    m = 0.5 * (p + q)

    def kl(a, b):
        nz = a > 0
        return float(np.sum(a[nz] * np.log2(a[nz] / b[nz])))

    return 0.5 * kl(p, m) + 0.5 * kl(q, m)


def spearman(p, q) -> float:
    """Spearman rank correlation (average ranks for ties)."""
    rho = _stats.spearmanr(p, q).statistic
    return float(rho)


def compare_pmfs(reference, other) -> dict:
    reference = np.asarray(reference)
    other = np.asarray(other)
    return {
        "spearman": spearman(reference, other),
        "js_divergence": js_divergence(reference, other),
        "peak_shift": int(abs(int(np.argmax(reference)) - int(np.argmax(other)))),
    }
