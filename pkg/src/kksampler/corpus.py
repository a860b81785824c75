"""Curated test functions spanning the regimes the error bounds distinguish:
band-limited, Schwartz-smooth, finitely smooth, and discontinuous.

Each entry evaluates on points shaped (..., d).  Where a closed-form Fourier
transform exists it is carried along (same convention as the kernels module);
1-D entries may also carry an exact antiderivative so cell averages of
discontinuous signals do not depend on quadrature behaviour at the jump.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = ["TestFunction", "corpus", "get_function"]


@dataclass
class TestFunction:
    id: str
    dim: int
    eval: Callable
    fourier: Optional[Callable] = None
    fourier_factors: Optional[list] = None  # 1-D factors for tensor transforms
    fourier_breakpoints: tuple = ()  # kinks of each 1-D factor, for quadrature
    band_limit: Optional[float] = None
    antiderivative: Optional[Callable] = None  # d=1 only
    smoothness: str = ""
    decay: str = ""

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))


def _gauss_1d(x):
    return np.exp(-np.pi * x[..., 0] ** 2)


def _gauss_1d_hat(xi):
    return np.exp(-np.pi * xi[..., 0] ** 2) + 0.0j


def _bump_bl(x):
    return np.sinc(x[..., 0] / 4.0) ** 2


def _tri(t):
    return np.maximum(1.0 - np.abs(t), 0.0)


def _bump_bl_hat(xi):
    return 4.0 * _tri(4.0 * xi[..., 0]) + 0.0j


def _chi01(x):
    t = x[..., 0]
    return np.where((t >= 0.0) & (t <= 1.0), 1.0, 0.0)


def _chi01_anti(t):
    return np.clip(t, 0.0, 1.0)


def _chi01_hat(xi):
    t = xi[..., 0]
    return np.exp(-1j * np.pi * t) * np.sinc(t)


def _cusp(x):
    return np.maximum(1.0 - np.abs(x[..., 0]), 0.0) ** 1.5


def _cusp_anti(t):
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    lo = t <= -1.0
    mid = (t > -1.0) & (t <= 0.0)
    hi = (t > 0.0) & (t < 1.0)
    top = t >= 1.0
    out[lo] = 0.0
    out[mid] = 0.4 * (1.0 + t[mid]) ** 2.5
    out[hi] = 0.4 * (2.0 - (1.0 - t[hi]) ** 2.5)
    out[top] = 0.8
    return out


def _gauss_2d(x):
    return np.exp(-np.pi * np.sum(x * x, axis=-1))


def _gauss_2d_hat(xi):
    return np.exp(-np.pi * np.sum(xi * xi, axis=-1)) + 0.0j


def _bump_bl_2d(x):
    return np.sinc(x[..., 0] / 4.0) ** 2 * np.sinc(x[..., 1] / 4.0) ** 2


def _bump_bl_2d_hat(xi):
    return 16.0 * _tri(4.0 * xi[..., 0]) * _tri(4.0 * xi[..., 1]) + 0.0j


def _radial_bump_2d(x):
    return np.maximum(1.0 - np.sum(x * x, axis=-1), 0.0) ** 3


_ENTRIES = [
    TestFunction(
        id="gaussian_1d", dim=1, eval=_gauss_1d, fourier=_gauss_1d_hat,
        smoothness="C^inf, omega_n ~ h^n for all n", decay="e^{-pi x^2}"),
    TestFunction(
        id="bump_bl", dim=1, eval=_bump_bl, fourier=_bump_bl_hat,
        fourier_factors=[lambda t: 4.0 * _tri(4.0 * t) + 0.0j],
        fourier_breakpoints=(-0.25, 0.0, 0.25), band_limit=0.25,
        smoothness="band-limited, Lipschitz derivative", decay="~ x^-2"),
    TestFunction(
        id="chi01", dim=1, eval=_chi01, fourier=_chi01_hat,
        antiderivative=_chi01_anti,
        smoothness="jump discontinuity, omega_1(h)_2 ~ h^{1/2}",
        decay="compact support"),
    TestFunction(
        id="cusp", dim=1, eval=_cusp, antiderivative=_cusp_anti,
        smoothness="Lipschitz, omega_2(h)_p ~ h^{3/2} at p=2",
        decay="compact support"),
    TestFunction(
        id="gaussian_2d", dim=2, eval=_gauss_2d, fourier=_gauss_2d_hat,
        smoothness="C^inf", decay="e^{-pi |x|^2}"),
    TestFunction(
        id="bump_bl_2d", dim=2, eval=_bump_bl_2d, fourier=_bump_bl_2d_hat,
        fourier_factors=[lambda t: 4.0 * _tri(4.0 * t) + 0.0j,
                         lambda t: 4.0 * _tri(4.0 * t) + 0.0j],
        fourier_breakpoints=(-0.25, 0.0, 0.25), band_limit=0.25,
        smoothness="band-limited tensor bump", decay="~ |x|^-2 per axis"),
    TestFunction(
        id="radial_bump_2d", dim=2, eval=_radial_bump_2d,
        smoothness="C^2 with jump in third radial derivative",
        decay="compact support"),
]


def corpus():
    """The full list of curated test functions."""
    return list(_ENTRIES)


def get_function(name):
    for f in _ENTRIES:
        if f.id == name:
            return f
    raise KeyError("unknown corpus function %r (have: %s)"
                   % (name, ", ".join(f.id for f in _ENTRIES)))
