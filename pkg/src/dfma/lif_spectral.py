"""Frequency-domain view of the subthreshold LIF recurrence ``u_t = beta*u_{t-1} + alpha*I_t``.

Only the pole ``beta`` shapes the DC-normalized power response::

    h(omega; beta) = (1 - beta)**2 / ((1 - beta)**2 + 2*beta*(1 - cos(omega)))

which equals 1 at DC and decreases in both ``omega`` and ``beta``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectrum import FrequencyGrid

#: smallest beta whose half-power point lies inside ``(0, pi]``
BETA_MIN_CUTOFF = 3.0 - 2.0 * math.sqrt(2.0)

SCHEMES = ("euler", "exponential")

_CLAMP_TOL = 1e-12


def check_beta(beta):
    b = np.asarray(beta, dtype=np.float64)
    if not np.all((b >= 0.0) & (b < 1.0)):
        raise ParameterError(f"beta must lie in [0, 1), got {beta!r}")
    return b


@dataclass(frozen=True)
class LeakParam:
    beta: float
    tau: float
    scheme: str = "euler"


def leak_from_tau(tau: float, scheme: str = "euler") -> LeakParam:
    """Membrane decay from a time constant (in steps, dt = 1)."""
    if scheme == "euler":
        if not tau >= 1.0 or not math.isfinite(tau):
            raise ParameterError(f"euler scheme needs a finite tau >= 1, got {tau!r}")
        return LeakParam(1.0 - 1.0 / tau, float(tau), scheme)
    if scheme == "exponential":
        if not tau > 0.0 or not math.isfinite(tau):
            raise ParameterError(f"exponential scheme needs a finite tau > 0, got {tau!r}")
        return LeakParam(math.exp(-1.0 / tau), float(tau), scheme)
    raise ParameterError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def tau_from_beta(beta):
    """``1 / (1 - beta)``; works elementwise on arrays."""
    b = check_beta(beta)
    tau = 1.0 / (1.0 - b)
    return float(tau) if tau.ndim == 0 else tau


def leak_from_beta(beta: float) -> LeakParam:
    b = float(check_beta(beta))
    return LeakParam(b, 1.0 / (1.0 - b), "euler")


def template_at(omega, beta):
    """DC-normalized power response; broadcasts over ``omega`` and ``beta``."""
    b = check_beta(beta)
    w = np.asarray(omega, dtype=np.float64)
    if np.any((w < 0.0) | (w > math.pi)):
        raise ParameterError("omega must lie in [0, pi]")
    num = (1.0 - b) ** 2
    # 1 - cos(w) written as 2*sin(w/2)**2 to avoid cancellation at small w
    half = np.sin(0.5 * w)
    out = num / (num + 4.0 * b * half * half)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LifTemplate:
    grid: FrequencyGrid
    beta: float
    values: np.ndarray

    def to_csv(self) -> str:
        rows = ["omega,h_tilde"]
        rows += [f"{float(w)!r},{float(h)!r}" for w, h in zip(self.grid.omegas, self.values)]
        return "\n".join(rows) + "\n"


def sample_template(grid: FrequencyGrid, beta: float) -> LifTemplate:
    return LifTemplate(grid, float(beta), np.asarray(template_at(grid.omegas, beta)))


@dataclass(frozen=True)
class Bandwidth:
    """Half-power cutoff of the template.

    ``cutoff`` is ``None`` when the response never falls to one half inside
    the band (``beta < 3 - 2*sqrt(2)``); the effective bandwidth then
    saturates at Nyquist.
    """

    beta: float
    cutoff: float | None
    quantized_bin: int | None = None

    @property
    def saturated(self) -> bool:
        return self.cutoff is None

    @property
    def b_eff(self) -> float:
        return math.pi if self.cutoff is None else self.cutoff

    def to_dict(self) -> dict:
        doc = {"beta": self.beta, "tau": 1.0 / (1.0 - self.beta)}
        if self.saturated:
            doc["saturated"] = True
        else:
            doc["cutoff"] = self.cutoff
        doc["b_eff"] = self.b_eff
        if self.quantized_bin is not None:
            doc["bin"] = self.quantized_bin
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def cutoff(beta: float) -> Bandwidth:
    """Solve ``h(omega_c; beta) = 1/2``.

    From ``1 - cos(omega_c) = (1-beta)**2 / (2*beta)`` we use the half-angle
    form ``omega_c = 2*asin((1-beta) / (2*sqrt(beta)))``. It is the same
    root as ``acos((4*beta - 1 - beta**2) / (2*beta))`` but keeps full
    relative accuracy as ``omega_c -> 0`` (beta -> 1) and lands exactly on pi
    at the existence boundary.
    """
    b = float(check_beta(beta))
    if b < BETA_MIN_CUTOFF:
        return Bandwidth(b, None)
    # s <= 1 whenever beta >= BETA_MIN_CUTOFF; clamp absorbs the last-ulp excess
    s = min((1.0 - b) / (2.0 * math.sqrt(b)), 1.0)
    return Bandwidth(b, 2.0 * math.asin(s))


def cutoff_arccos(beta: float) -> float | None:
    """Direct ``acos`` form of the cutoff, clamped at the +-1 boundary."""
    b = float(check_beta(beta))
    if b < BETA_MIN_CUTOFF:
        return None
    x = (4.0 * b - 1.0 - b * b) / (2.0 * b)
    if abs(x) > 1.0 + _CLAMP_TOL:
        raise ParameterError(f"acos argument {x} out of range for beta={b}")
    return math.acos(min(1.0, max(-1.0, x)))


def effective_bandwidth(beta: float) -> float:
    return cutoff(beta).b_eff


def quantize_cutoff(bw: Bandwidth, grid: FrequencyGrid) -> int:
    """Index of the grid bin nearest to the cutoff; exact ties go to the lower bin.

    A saturated bandwidth maps to the top bin ``K``.
    """
    if bw.saturated:
        return grid.K
    wc = bw.cutoff
    pos = wc * grid.L / (2.0 * math.pi)
    lo = min(max(int(math.floor(pos)), 0), grid.K)
    hi = min(lo + 1, grid.K)
    d_lo = abs(grid.omegas[lo] - wc)
    d_hi = abs(grid.omegas[hi] - wc)
    # a few ulps of slack so a mathematically exact midpoint resolves downward
    return lo if d_lo <= d_hi + 4.0 * np.finfo(float).eps * math.pi else hi


def with_bin(bw: Bandwidth, grid: FrequencyGrid) -> Bandwidth:
    return Bandwidth(bw.beta, bw.cutoff, quantize_cutoff(bw, grid))


def in_band_bins(grid: FrequencyGrid, beta: float) -> np.ndarray:
    """Bins with ``omega_k <= B_eff(beta)``."""
    return np.flatnonzero(grid.omegas <= effective_bandwidth(beta))
