"""Compute-energy estimates for dense (MAC) and spiking (AC) layers.

Op counts are in millions, per-op energies in picojoules and totals in
microjoules. For a spiking network the first layer sees real-valued input and
is charged as dense MACs; every later layer is charged one AC per synaptic
operation, ``SOPs = T * rate * FLOPs``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import FormatError, KindError, ParameterError

KINDS = ("dense", "spiking")
PJ_PER_UJ = 1e6
OPS_PER_MOP = 1e6


@dataclass(frozen=True)
class EnergyConstants:
    e_mac: float = 4.6
    e_ac: float = 0.9

    def __post_init__(self):
        if not (self.e_mac > 0 and self.e_ac > 0):
            raise ParameterError("energy constants must be positive")


@dataclass(frozen=True)
class LayerOps:
    name: str
    kind: str
    base_ops: float
    rate: float | None = None
    timesteps: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KindError(f"layer {self.name!r}: kind must be one of {KINDS}, got {self.kind!r}")
        if not self.base_ops >= 0:
            raise ParameterError(f"layer {self.name!r}: op count must be >= 0")
        if int(self.timesteps) != self.timesteps or self.timesteps < 1:
            raise ParameterError(f"layer {self.name!r}: timesteps must be a positive integer")
        if self.kind == "spiking":
            if self.rate is None or not 0.0 <= self.rate <= 1.0:
                raise ParameterError(f"layer {self.name!r}: spiking layers need a rate in [0, 1]")
        elif self.rate is not None:
            raise ParameterError(f"layer {self.name!r}: dense layers take no spike rate")


def _uj(pj_per_op: float, mops: float) -> float:
    return pj_per_op * mops * OPS_PER_MOP / PJ_PER_UJ


def ann_energy(layers: Sequence[LayerOps], constants: EnergyConstants = EnergyConstants()) -> float:
    spiking = [l.name for l in layers if l.kind != "dense"]
    if spiking:
        raise KindError(f"dense energy requested for spiking layers {spiking}")
    return sum(_uj(constants.e_mac, l.base_ops) for l in layers)


def sops(layer: LayerOps) -> float:
    if layer.kind != "spiking":
        raise KindError(f"layer {layer.name!r} is not spiking")
    return layer.timesteps * layer.rate * layer.base_ops


@dataclass(frozen=True)
class EnergyReport:
    energy_uj: float
    total_mops: float
    per_layer: tuple   # (name, kind, mops charged, energy_uj)

    def to_dict(self) -> dict:
        return {
            "energy_uj": self.energy_uj,
            "ops_m": self.total_mops,
            "layers": [{"name": n, "kind": k, "ops_m": o, "energy_uj": e}
                       for n, k, o, e in self.per_layer],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_table(self) -> str:
        rows = [(n, k, f"{o:.2f}", f"{e:.2f}") for n, k, o, e in self.per_layer]
        rows.append(("total", "", f"{self.total_mops:.2f}", f"{self.energy_uj:.2f}"))
        head = ("layer", "kind", "#OPs (M)", "Energy (uJ)")
        widths = [max(len(r[i]) for r in rows + [head]) for i in range(4)]
        fmt = lambda r: "  ".join(c.ljust(w) if i < 2 else c.rjust(w)
                                  for i, (c, w) in enumerate(zip(r, widths)))
        return "\n".join([fmt(head)] + [fmt(r) for r in rows]) + "\n"


def snn_energy(layers: Sequence[LayerOps], constants: EnergyConstants = EnergyConstants()) -> EnergyReport:
    if not layers:
        raise KindError("a spiking network needs at least its dense input layer")
    first, rest = layers[0], layers[1:]
    if first.kind != "dense":
        raise KindError("the first layer must be dense")
    late_dense = [l.name for l in rest if l.kind != "spiking"]
    if late_dense:
        raise KindError(f"layers after the first must be spiking, got dense {late_dense}")
    per_layer = [(first.name, first.kind, first.base_ops, _uj(constants.e_mac, first.base_ops))]
    for l in rest:
        s = sops(l)
        per_layer.append((l.name, l.kind, s, _uj(constants.e_ac, s)))
    return EnergyReport(sum(p[3] for p in per_layer), sum(p[2] for p in per_layer), tuple(per_layer))


def dense_report(layers: Sequence[LayerOps], constants: EnergyConstants = EnergyConstants()) -> EnergyReport:
    ann_energy(layers, constants)
    per_layer = tuple((l.name, l.kind, l.base_ops, _uj(constants.e_mac, l.base_ops)) for l in layers)
    return EnergyReport(sum(p[3] for p in per_layer), sum(p[2] for p in per_layer), per_layer)


def parse_architecture(doc: Mapping) -> list:
    """``{"timesteps": T, "layers": [{"name", "kind", "mops", "rate"?}, ...]}`` -> layers."""
    if not isinstance(doc, Mapping) or not isinstance(doc.get("layers"), list):
        raise FormatError("architecture must be an object with a 'layers' list")
    T = doc.get("timesteps", 1)
    if isinstance(T, bool) or not isinstance(T, int):
        raise ParameterError(f"timesteps must be an integer, got {T!r}")
    layers = []
    for i, l in enumerate(doc["layers"]):
        try:
            layers.append(LayerOps(str(l.get("name", f"layer{i + 1}")), l["kind"], float(l["mops"]),
                                   None if l.get("rate") is None else float(l["rate"]), T))
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise
            raise FormatError(f"layer {i}: malformed entry ({exc!r})") from exc
    return layers


def estimate(layers: Sequence[LayerOps], constants: EnergyConstants = EnergyConstants()) -> EnergyReport:
    """Dense report for all-dense networks, otherwise the spiking accounting."""
    if all(l.kind == "dense" for l in layers):
        return dense_report(layers, constants)
    return snn_energy(layers, constants)
