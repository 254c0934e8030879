"""Dataset manifest: class names, sample files with labels/splits, normalization stats."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import FormatError, LeakageError, ParameterError
from .tensorfile import read_tensor

SPLITS = ("train", "test")


@dataclass(frozen=True)
class SampleEntry:
    path: str
    label: object
    split: str


@dataclass(frozen=True)
class NormStats:
    mean: np.ndarray
    std: np.ndarray

    def to_dict(self) -> dict:
        return {"mean": [float(x) for x in self.mean], "std": [float(x) for x in self.std]}

    @classmethod
    def from_dict(cls, doc) -> "NormStats":
        try:
            mean = np.asarray(doc["mean"], dtype=np.float64)
            std = np.asarray(doc["std"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed norm_stats: {exc}") from exc
        if mean.shape != std.shape or mean.ndim != 1:
            raise FormatError("norm_stats mean/std must be equal-length lists")
        if np.any(std < 0):
            raise FormatError("norm_stats std must be non-negative")
        return cls(mean, std)


@dataclass
class DatasetManifest:
    classes: list
    samples: list
    norm_stats: NormStats | None = None
    normalize: bool = True
    root: str = field(default=".", compare=False)

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "samples": [{"path": s.path, "label": s.label, "split": s.split} for s in self.samples],
            "norm_stats": None if self.norm_stats is None else self.norm_stats.to_dict(),
            "normalize": self.normalize,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def entries(self, split: str) -> list:
        if split not in SPLITS:
            raise ParameterError(f"unknown split {split!r}")
        return [s for s in self.samples if s.split == split]

    def load(self, entry: SampleEntry) -> np.ndarray:
        """Read one sample as float64, normalized over axis 1 if requested."""
        x = read_tensor(os.path.join(self.root, entry.path)).astype(np.float64)
        if self.normalize and self.norm_stats is not None:
            from .pointcloud import normalize
            x = normalize(x, self.norm_stats)
        return x

    def training_set(self, split: str = "train"):
        """Samples and labels for DI estimation; only the training split is allowed."""
        if split != "train":
            raise LeakageError(f"refusing to estimate DI from the {split!r} split")
        entries = self.entries("train")
        if not entries:
            raise ParameterError("training split is empty")
        return [self.load(e) for e in entries], [e.label for e in entries]


def parse_manifest(doc, root: str = ".") -> DatasetManifest:
    if not isinstance(doc, dict):
        raise FormatError("manifest must be a JSON object")
    for key in ("classes", "samples"):
        if key not in doc:
            raise FormatError(f"manifest is missing {key!r}")
    classes = doc["classes"]
    if not isinstance(classes, list) or not classes or len(set(map(json.dumps, classes))) != len(classes):
        raise FormatError("'classes' must be a non-empty list of distinct names")
    samples = []
    for i, s in enumerate(doc["samples"]):
        try:
            entry = SampleEntry(str(s["path"]), s["label"], s["split"])
        except (KeyError, TypeError) as exc:
            raise FormatError(f"sample {i} is malformed: {exc}") from exc
        if entry.label not in classes:
            raise FormatError(f"sample {i} has label {entry.label!r} not in classes")
        if entry.split not in SPLITS:
            raise FormatError(f"sample {i} has split {entry.split!r}; expected one of {SPLITS}")
        samples.append(entry)
    ns = doc.get("norm_stats")
    return DatasetManifest(classes, samples,
                           None if ns is None else NormStats.from_dict(ns),
                           bool(doc.get("normalize", True)), root)


def load_manifest(path) -> DatasetManifest:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    return parse_manifest(doc, os.path.dirname(os.path.abspath(path)))


def stratified_split(labels, test_fraction: float, rng) -> list:
    """Assign ``"train"``/``"test"`` per sample, holding out ``round(frac * n)`` of each class.

    Every class keeps at least one training sample.
    """
    if not 0.0 <= test_fraction < 1.0:
        raise ParameterError(f"test fraction must lie in [0, 1), got {test_fraction!r}")
    splits = ["train"] * len(labels)
    for c in sorted(set(labels), key=str):
        idx = [i for i, y in enumerate(labels) if y == c]
        n_test = min(int(round(test_fraction * len(idx))), len(idx) - 1)
        for i in rng.permutation(idx)[:n_test]:
            splits[int(i)] = "test"
    return splits
