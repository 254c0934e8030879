"""Discrete-time LIF neurons: stepping, spike statistics and an empirical gain probe.

State update per step (dt = 1)::

    u = beta * u_prev + alpha * I
    spike = u >= v_th
    u_next = v_reset (hard) | u - v_th (soft)   if spike else u

``alpha`` is 1 when the input is injected after the decay and ``1/tau`` when
it takes part in the decay (``decay_input=True``), which under the Euler map
gives the familiar ``u = beta*u + (1-beta)*I``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ParameterError, ShapeError
from .lif_spectral import LeakParam, leak_from_beta, leak_from_tau

RESET_MODES = ("hard", "soft")

DEFAULT_GAMMA_MIN = 0.01
DEFAULT_GAMMA_MAX = 0.99
DEFAULT_KAPPA = 20.0
DEFAULT_FLAG_EPS = 1e-9


@dataclass(frozen=True)
class LifConfig:
    leak: LeakParam
    decay_input: bool = False
    v_th: float = 1.0
    v_reset: float = 0.0
    reset_mode: str = "hard"

    def __post_init__(self):
        if self.reset_mode not in RESET_MODES:
            raise ParameterError(f"reset_mode must be one of {RESET_MODES}, got {self.reset_mode!r}")
        if not self.v_th > 0:
            raise ParameterError(f"v_th must be positive, got {self.v_th!r}")
        if self.reset_mode == "hard" and not self.v_th > self.v_reset:
            raise ParameterError("hard reset needs v_th > v_reset")
        if self.leak.scheme == "euler" and self.leak.tau < 1.0:
            raise ParameterError("euler scheme needs tau >= 1")

    @property
    def beta(self) -> float:
        return self.leak.beta

    @property
    def alpha(self) -> float:
        return 1.0 / self.leak.tau if self.decay_input else 1.0

    @classmethod
    def from_dict(cls, doc: Mapping) -> "LifConfig":
        """Build from ``{"beta"|"tau", "scheme", "decay_input", "v_th", "v_reset", "reset_mode"}``.

        ``v_th`` may be ``null`` or the string ``"inf"`` to disable firing.
        """
        scheme = doc.get("scheme", "euler")
        if "tau" in doc:
            leak = leak_from_tau(float(doc["tau"]), scheme)
        elif "beta" in doc:
            if scheme != "euler":
                raise ParameterError("give tau, not beta, for the exponential scheme")
            leak = leak_from_beta(float(doc["beta"]))
        else:
            raise ParameterError("config needs 'beta' or 'tau'")
        v_th = doc.get("v_th", 1.0)
        v_th = math.inf if v_th is None else float(v_th)
        return cls(leak, bool(doc.get("decay_input", False)), v_th,
                   float(doc.get("v_reset", 0.0)), doc.get("reset_mode", "hard"))


def step(config: LifConfig, u_prev, current):
    """One update; works elementwise on arrays of neurons."""
    u = config.beta * np.asarray(u_prev, dtype=np.float64) + config.alpha * np.asarray(current, dtype=np.float64)
    spike = u >= config.v_th
    if config.reset_mode == "hard":
        u_next = np.where(spike, config.v_reset, u)
    else:
        u_next = np.where(spike, u - config.v_th, u)
    if u_next.ndim == 0:
        return float(u_next), int(spike)
    return u_next, spike.astype(np.int8)


@dataclass
class SpikeTrace:
    """``potentials[t]`` is the post-reset state after step ``t``;
    ``pre_reset[t]`` the candidate value compared against threshold."""

    potentials: np.ndarray
    spikes: np.ndarray
    pre_reset: np.ndarray = field(repr=False)

    @property
    def T(self) -> int:
        return self.spikes.shape[0]

    def to_csv(self) -> str:
        if self.potentials.ndim != 1:
            raise ShapeError("CSV export is for single-neuron traces")
        rows = ["t,u,spike"]
        rows += [f"{t},{float(u)!r},{int(s)}" for t, (u, s) in enumerate(zip(self.potentials, self.spikes))]
        return "\n".join(rows) + "\n"


def run(config: LifConfig, inputs, T: int | None = None, u0=0.0) -> SpikeTrace:
    """Iterate :func:`step` for ``T`` steps.

    ``inputs`` has shape ``(T_in,)`` for one neuron or ``(T_in, N)`` for a
    layer of identical, unconnected neurons.
    """
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim not in (1, 2):
        raise ShapeError(f"inputs must be (T,) or (T, N), got {x.shape}")
    if T is None:
        T = x.shape[0]
    if T < 1:
        raise ParameterError(f"T must be positive, got {T}")
    if x.shape[0] < T:
        raise ShapeError(f"need at least {T} input steps, got {x.shape[0]}")
    u = np.broadcast_to(np.asarray(u0, dtype=np.float64), x.shape[1:]).copy()
    pots = np.empty((T,) + x.shape[1:])
    pre = np.empty_like(pots)
    spikes = np.zeros((T,) + x.shape[1:], dtype=np.int8)
    beta, alpha = config.beta, config.alpha
    for t in range(T):
        cand = beta * u + alpha * x[t]
        fired = cand >= config.v_th
        if config.reset_mode == "hard":
            u = np.where(fired, config.v_reset, cand)
        else:
            u = np.where(fired, cand - config.v_th, cand)
        pre[t] = cand
        pots[t] = u
        spikes[t] = fired
    return SpikeTrace(pots, spikes, pre)


def mean_spike_rate(spikes) -> float:
    """Spikes per neuron per timestep.

    Accepts a ``(T,)`` / ``(T, N)`` array, a :class:`SpikeTrace`, or a list of
    either sharing the same ``T``.
    """
    if isinstance(spikes, SpikeTrace):
        spikes = spikes.spikes
    if isinstance(spikes, (list, tuple)):
        if not spikes:
            raise ParameterError("no traces given")
        arrs = [np.asarray(s.spikes if isinstance(s, SpikeTrace) else s) for s in spikes]
        if len({a.shape[0] for a in arrs}) != 1:
            raise ShapeError("traces have different lengths")
        spikes = np.concatenate([a.reshape(a.shape[0], -1) for a in arrs], axis=1)
    s = np.asarray(spikes, dtype=np.float64)
    if s.size == 0:
        raise ParameterError("empty spike collection")
    return float(s.mean())


@dataclass(frozen=True)
class LayerDiagnosis:
    out_of_bounds: tuple     # betas whose rate falls outside [gamma_min, gamma_max]
    ratio: float             # max rate / (min rate + eps)
    ratio_exceeded: bool

    @property
    def flagged(self) -> bool:
        return bool(self.out_of_bounds) or self.ratio_exceeded


@dataclass(frozen=True)
class ValidityReport:
    flagged: bool
    layers: dict

    def to_dict(self) -> dict:
        return {
            "flagged": self.flagged,
            "layers": {
                name: {
                    "flagged": d.flagged,
                    "out_of_bounds": [float(b) for b in d.out_of_bounds],
                    "ratio": d.ratio,
                    "ratio_exceeded": d.ratio_exceeded,
                }
                for name, d in self.layers.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def validity_flag(rates_by_layer: Mapping[str, Mapping[float, float]],
                  gamma_min: float = DEFAULT_GAMMA_MIN, gamma_max: float = DEFAULT_GAMMA_MAX,
                  kappa: float = DEFAULT_KAPPA, eps: float = DEFAULT_FLAG_EPS) -> ValidityReport:
    """Flag a beta sweep whose layer rates saturate, collapse or spread by more than ``kappa``."""
    if not 0 < gamma_min < gamma_max < 1:
        raise ParameterError("need 0 < gamma_min < gamma_max < 1")
    if not kappa > 1:
        raise ParameterError("kappa must exceed 1")
    if not eps > 0:
        raise ParameterError("eps must be positive")
    if not rates_by_layer:
        raise ParameterError("no layers given")
    layers = {}
    for name, by_beta in rates_by_layer.items():
        if not by_beta:
            raise ParameterError(f"layer {name!r} has no rates")
        rates = {float(b): float(g) for b, g in by_beta.items()}
        bad = [g for g in rates.values() if not 0.0 <= g <= 1.0]
        if bad:
            raise ParameterError(f"layer {name!r} has rates outside [0, 1]: {bad}")
        oob = tuple(sorted(b for b, g in rates.items() if not gamma_min <= g <= gamma_max))
        ratio = max(rates.values()) / (min(rates.values()) + eps)
        layers[name] = LayerDiagnosis(oob, ratio, ratio > kappa)
    return ValidityReport(any(d.flagged for d in layers.values()), layers)


def _period(omega: float, max_period: int = 1 << 16) -> int:
    """Smallest P with omega*P a multiple of 2*pi (omega must be a rational fraction of 2*pi)."""
    f = omega / (2.0 * math.pi)
    for p in range(1, max_period + 1):
        if abs(f * p - round(f * p)) < 1e-9:
            return p
    raise ParameterError(f"omega={omega} is not an on-grid frequency 2*pi*k/P with P <= {max_period}")


def gain_probe(config: LifConfig, omega: float, cycles: int = 8) -> float:
    """Measure ``|u| / |I|`` for a unit cosine drive at ``omega`` in steady state.

    The threshold must be disabled (``v_th = inf``). After discarding
    ``ceil(10 / (1 - beta))`` transient steps, input and response are each
    projected onto the single DFT bin at ``omega`` over ``cycles`` full
    periods. ``omega = 0`` measures the DC step response instead.
    """
    if math.isfinite(config.v_th):
        raise ParameterError("gain_probe needs the threshold disabled (v_th = inf)")
    if not 0.0 <= omega <= math.pi:
        raise ParameterError(f"omega must lie in [0, pi], got {omega}")
    if cycles < 1:
        raise ParameterError("cycles must be >= 1")
    beta = config.beta
    transient = int(math.ceil(10.0 / (1.0 - beta)))
    period = 1 if omega == 0.0 else _period(omega)
    n = period * cycles
    t = np.arange(transient + n)
    drive = np.ones(t.shape) if omega == 0.0 else np.cos(omega * t)
    u = run(config, drive).potentials[transient:]
    x = drive[transient:]
    if omega == 0.0:
        return float(u.mean() / x.mean())
    phase = np.exp(-1j * omega * t[transient:])
    return float(abs(u @ phase) / abs(x @ phase))


def closed_form_gain(beta: float, alpha: float, omega: float) -> float:
    """``alpha / |1 - beta * exp(-j*omega)|``."""
    return alpha / abs(1.0 - beta * np.exp(-1j * omega))
