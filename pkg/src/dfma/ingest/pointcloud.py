"""Fixed-size point-cloud tensors from variable-length radar recordings.

A recording is a list of frames, each an ``(n_points, 4)`` array of
``(x, y, z, v)``. Frames and points are brought to fixed budgets by
equally spaced subsampling (endpoints kept) or zero padding, and a sample is
stored as an ``(f_max, 4, p_max, 1)`` tensor so channels sit on axis 1.
"""
from __future__ import annotations

import csv
from typing import Sequence

import numpy as np

from ..errors import ParameterError, ShapeError
from .manifest import NormStats

D = 4
CHANNELS = ("x", "y", "z", "v")
DEFAULT_F_MAX = 4
DEFAULT_P_MAX = 64
MAP_SIZE = 64
FEATURES_PER_FRAME = 256
SHAPE_MODES = ("rowmajor", "block16")


def subsample_indices(n: int, m: int) -> np.ndarray:
    """``round(i*(n-1)/(m-1))`` for ``i = 0..m-1``, halves rounded up, in exact integers."""
    if m < 1 or n < m:
        raise ParameterError(f"cannot pick {m} of {n} items")
    if m == 1:
        return np.zeros(1, dtype=np.int64)
    i = np.arange(m, dtype=np.int64)
    return (2 * i * (n - 1) + (m - 1)) // (2 * (m - 1))


def _as_points(frame) -> np.ndarray:
    p = np.asarray(frame, dtype=np.float64)
    if p.size == 0:
        return np.zeros((0, D))
    if p.ndim != 2 or p.shape[1] != D:
        raise ShapeError(f"a frame must be an (n, {D}) array, got {p.shape}")
    return p


def align_frames(frames: Sequence, f_max: int = DEFAULT_F_MAX) -> list:
    if f_max < 1:
        raise ParameterError("f_max must be >= 1")
    frames = [_as_points(f) for f in frames]
    if len(frames) > f_max:
        return [frames[i] for i in subsample_indices(len(frames), f_max)]
    return frames + [np.zeros((0, D)) for _ in range(f_max - len(frames))]


def align_points(frame, p_max: int = DEFAULT_P_MAX) -> np.ndarray:
    if p_max < 1:
        raise ParameterError("p_max must be >= 1")
    pts = _as_points(frame)
    if len(pts) > p_max:
        return pts[subsample_indices(len(pts), p_max)].copy()
    out = np.zeros((p_max, D))
    out[:len(pts)] = pts
    return out


def build_sample(frames: Sequence, f_max: int = DEFAULT_F_MAX, p_max: int = DEFAULT_P_MAX) -> np.ndarray:
    """Recording -> ``(f_max, 4, p_max, 1)`` tensor."""
    aligned = [align_points(f, p_max) for f in align_frames(frames, f_max)]
    return np.stack(aligned).transpose(0, 2, 1)[..., np.newaxis]


def read_recording_csv(path) -> list:
    """Read a ``frame,x,y,z,v`` CSV into frames ordered by frame index.

    Missing frame indices between the first and last are kept as empty frames.
    """
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"frame", *CHANNELS}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise ShapeError(f"{path}: header must contain {sorted(need)}")
        for r in reader:
            try:
                f = int(r["frame"])
                pt = [float(r[c]) for c in CHANNELS]
            except (TypeError, ValueError) as exc:
                raise ShapeError(f"{path}: bad row {r}: {exc}") from exc
            rows.setdefault(f, []).append(pt)
    if not rows:
        return []
    lo, hi = min(rows), max(rows)
    return [np.asarray(rows.get(f, np.zeros((0, D))), dtype=np.float64).reshape(-1, D)
            for f in range(lo, hi + 1)]


def compute_norm_stats(samples) -> NormStats:
    """Per-channel (axis 1) mean and population std over all training entries."""
    samples = list(samples)
    if not samples:
        raise ParameterError("cannot compute normalization stats from an empty training set")
    cols = [np.moveaxis(np.asarray(s, dtype=np.float64), 1, -1).reshape(-1, np.shape(s)[1])
            for s in samples]
    if len({c.shape[1] for c in cols}) != 1:
        raise ShapeError("samples disagree on the channel count")
    allv = np.concatenate(cols)
    return NormStats(allv.mean(axis=0), allv.std(axis=0))


def _channel_view(stats: NormStats, ndim: int):
    shape = [1] * ndim
    shape[1] = -1
    return stats.mean.reshape(shape), stats.std.reshape(shape)


def normalize(sample, stats: NormStats) -> np.ndarray:
    """``(x - mean) / std`` per channel; channels with zero std are left untouched."""
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim < 2 or x.shape[1] != len(stats.mean):
        raise ShapeError(f"sample with shape {x.shape} does not have {len(stats.mean)} channels on axis 1")
    mean, std = _channel_view(stats, x.ndim)
    live = std > 0
    return np.where(live, (x - mean) / np.where(live, std, 1.0), x)


def denormalize(sample, stats: NormStats) -> np.ndarray:
    x = np.asarray(sample, dtype=np.float64)
    mean, std = _channel_view(stats, x.ndim)
    return np.where(std > 0, x * std + mean, x)


def frame_features(frame_points) -> np.ndarray:
    """Flatten one ``(p, 4)`` frame point-major, channel-minor."""
    return np.asarray(frame_points, dtype=np.float64).reshape(-1)


def shape_features(vector, mode: str = "rowmajor") -> np.ndarray:
    """Place a 256-vector into a zero 64x64 map.

    ``rowmajor`` zero-pads to 4096 and reshapes, so the features fill rows
    0-3. ``block16`` writes them into the top-left 16x16 block instead.
    """
    v = np.asarray(vector, dtype=np.float64)
    if v.shape != (FEATURES_PER_FRAME,):
        raise ShapeError(f"expected {FEATURES_PER_FRAME} features, got shape {v.shape}")
    out = np.zeros((MAP_SIZE, MAP_SIZE))
    if mode == "rowmajor":
        out.reshape(-1)[:FEATURES_PER_FRAME] = v
    elif mode == "block16":
        out[:16, :16] = v.reshape(16, 16)
    else:
        raise ParameterError(f"unknown shape mode {mode!r}; expected one of {SHAPE_MODES}")
    return out


def shape_sample(sample, mode: str = "rowmajor") -> np.ndarray:
    """``(L, 4, 64, 1)`` point tensor -> ``(L, 1, 64, 64)`` feature maps."""
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 4 or x.shape[1] * x.shape[2] * x.shape[3] != FEATURES_PER_FRAME:
        raise ShapeError(f"need {FEATURES_PER_FRAME} features per frame, got shape {x.shape}")
    frames = [shape_features(frame_features(f[..., 0].T), mode) for f in x]
    return np.stack(frames)[:, np.newaxis]
