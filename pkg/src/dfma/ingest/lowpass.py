"""Static radial low-pass on the two trailing (spatial) axes."""
from __future__ import annotations

import functools
import math

import numpy as np

from ..errors import ParameterError, ShapeError

#: largest radius on the centered grid, reached at the (-0.5, -0.5) corner
MAX_RADIUS = math.sqrt(0.5)


@functools.lru_cache(maxsize=32)
def radial_mask(H: int, W: int, nu: float) -> np.ndarray:
    """Centered mask keeping normalized spatial frequencies with radius <= ``nu``."""
    eta = np.fft.fftshift(np.fft.fftfreq(H))
    xi = np.fft.fftshift(np.fft.fftfreq(W))
    rho = np.hypot(eta[:, None], xi[None, :])
    mask = (rho <= nu + 1e-12).astype(np.float64)
    mask.setflags(write=False)
    return mask


def radial_lowpass(x, nu: float) -> np.ndarray:
    """Filter every ``H x W`` slice of ``x`` independently; returns the real part."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim < 2 or a.shape[-2] < 2 or a.shape[-1] < 2:
        raise ShapeError(f"need trailing spatial axes of size >= 2, got shape {a.shape}")
    if not nu >= 0 or not math.isfinite(nu):
        raise ParameterError(f"cutoff radius must be a finite number >= 0, got {nu!r}")
    mask = radial_mask(a.shape[-2], a.shape[-1], float(nu))
    F = np.fft.fftshift(np.fft.fft2(a), axes=(-2, -1)) * mask
    return np.real(np.fft.ifft2(np.fft.ifftshift(F, axes=(-2, -1))))
