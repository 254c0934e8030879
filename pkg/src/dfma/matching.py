"""Frequency-matching score and the maximum-deviation choice of beta.

``fms_avg(beta)`` is the inner product of the DI PMF with the LIF template,
i.e. the fraction of discriminative mass retained at that leak. The
reference boundary is the candidate whose normalized FMS deviates most from
the chord joining the sweep's endpoints in (normalized log tau, normalized
FMS) coordinates.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .di import DiSpectrum
from .errors import InsufficientCandidatesError, ParameterError, ShapeError
from .lif_spectral import check_beta, template_at

DEFAULT_UNDER_THRESHOLD = 0.05


def default_betas() -> np.ndarray:
    """0.05, 0.10, ..., 0.95."""
    return np.round(np.arange(1, 20) * 0.05, 10)


def fms_avg(di: DiSpectrum, beta: float) -> float:
    b = float(check_beta(beta))
    h = template_at(di.grid.omegas, b)
    score = math.fsum(float(x) for x in di.di_norm * h)
    # a PMF summing to 1 + O(ulp) must not push the score past 1
    return min(max(score, 0.0), 1.0)


@dataclass(frozen=True)
class FmsCurve:
    betas: np.ndarray
    fms: np.ndarray

    @property
    def taus(self) -> np.ndarray:
        return 1.0 / (1.0 - self.betas)

    def to_csv(self) -> str:
        rows = ["beta,tau,fms"]
        rows += [f"{float(b)!r},{float(t)!r},{float(f)!r}"
                 for b, t, f in zip(self.betas, self.taus, self.fms)]
        return "\n".join(rows) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "FmsCurve":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or not {"beta", "fms"} <= set(reader.fieldnames):
            raise ShapeError("FMS CSV needs 'beta' and 'fms' columns")
        try:
            rows = [(float(r["beta"]), float(r["fms"])) for r in reader]
        except (TypeError, ValueError) as exc:
            raise ShapeError(f"non-numeric entry in FMS CSV: {exc}") from exc
        if not rows:
            raise ShapeError("FMS CSV has no rows")
        betas, fms = map(np.asarray, zip(*rows))
        validate_betas(betas)
        return cls(betas, fms)


def validate_betas(betas) -> np.ndarray:
    b = np.asarray(betas, dtype=np.float64)
    if b.ndim != 1:
        raise ParameterError("beta candidates must be a flat sequence")
    if len(b) < 3:
        raise InsufficientCandidatesError(
            f"need at least 3 beta candidates, got {len(b)}")
    check_beta(b)
    if np.any(np.diff(b) <= 0):
        raise ParameterError("beta candidates must be strictly ascending")
    return b


def fms_sweep(di: DiSpectrum, betas) -> FmsCurve:
    b = validate_betas(betas)
    return FmsCurve(b, np.array([fms_avg(di, x) for x in b]))


def _minmax(x: np.ndarray):
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros_like(x), True
    return (x - lo) / (hi - lo), False


@dataclass(frozen=True)
class KneeResult:
    beta_dagger: float
    index: int
    phis: np.ndarray
    psis: np.ndarray
    deviations: np.ndarray
    degenerate: bool

    @property
    def tau_dagger(self) -> float:
        return 1.0 / (1.0 - self.beta_dagger)

    def to_dict(self) -> dict:
        return {
            "beta_dagger": float(self.beta_dagger),
            "tau_dagger": float(self.tau_dagger),
            "index": int(self.index),
            "deviations": [float(d) for d in self.deviations],
            "degenerate": bool(self.degenerate),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def select_boundary(curve: FmsCurve) -> KneeResult:
    """Maximum vertical deviation from the endpoint chord.

    Coordinates are min-max normalized over the sampled points, ``log`` is
    natural. If either coordinate range collapses the result is flagged
    degenerate and the first candidate is returned. Ties in the deviation go
    to the smallest beta.
    """
    betas = validate_betas(curve.betas)
    fms = np.asarray(curve.fms, dtype=np.float64)
    if fms.shape != betas.shape:
        raise ShapeError("betas and fms differ in length")
    phi, flat_phi = _minmax(np.log(1.0 / (1.0 - betas)))
    psi, flat_psi = _minmax(fms)
    if flat_phi or flat_psi:
        return KneeResult(float(betas[0]), 0, phi, psi, np.zeros_like(psi), True)
    chord = (1.0 - phi) * psi[0] + phi * psi[-1]
    dev = np.abs(chord - psi)
    r = int(np.argmax(dev))  # first occurrence on ties
    return KneeResult(float(betas[r]), r, phi, psi, dev, False)


class Regime(str, enum.Enum):
    UNDER_FILTER = "UnderFilter"
    STABILITY_WINDOW = "StabilityWindow"
    OVER_LOW_PASS = "OverLowPass"


def classify_regime(beta: float, beta_dagger: float,
                    under_threshold: float = DEFAULT_UNDER_THRESHOLD) -> Regime:
    check_beta([beta, beta_dagger, under_threshold])
    if beta >= beta_dagger:
        return Regime.OVER_LOW_PASS
    if beta < under_threshold:
        return Regime.UNDER_FILTER
    return Regime.STABILITY_WINDOW
