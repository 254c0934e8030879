"""Seeded toy datasets with a known discriminative spectrum."""
from __future__ import annotations

import numpy as np

from .errors import ParameterError


def tone_dataset(bins=(1, 3), n_per_class: int = 20, L: int = 16, amplitude: float = 1.0,
                 noise: float = 0.3, frame_shape=(1, 2, 2), seed: int = 0):
    """Class ``c`` carries a cosine at DFT bin ``bins[c]`` with a random phase per sample.

    Every tensor entry gets independent Gaussian noise, so after averaging
    over a frame the tone survives and the noise shrinks. Returns
    ``(samples, labels)`` with samples of shape ``(L, *frame_shape)`` and
    labels ``0..len(bins)-1``.
    """
    K = L // 2
    if len(bins) < 2 or len(set(bins)) != len(bins):
        raise ParameterError("need at least two distinct tone bins")
    if any(not 1 <= b <= K for b in bins):
        raise ParameterError(f"tone bins must lie in 1..{K} for L={L}")
    if n_per_class < 2:
        raise ParameterError("need at least two samples per class")
    rng = np.random.default_rng(seed)
    t = np.arange(L)
    samples, labels = [], []
    for c, k in enumerate(bins):
        for _ in range(n_per_class):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            tone = amplitude * np.cos(2.0 * np.pi * k * t / L + phase)
            x = tone.reshape((L,) + (1,) * len(frame_shape)) + noise * rng.standard_normal((L, *frame_shape))
            samples.append(x)
            labels.append(c)
    return samples, labels
