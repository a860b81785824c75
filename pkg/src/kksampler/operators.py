"""The sampling operator families evaluated on grids.

quasi_projection is the general matrix-dilation operator
  sum_k c_jk(f) phi(M^j x + k);
kantorovich_1d and generalized_sampling are the classical 1-D cell-average
and point-sample series; fourier_side_projection is the Kotelnikov route
driven by the Fourier transform of f.

Lattice sums are truncated over a single set K = {k : some grid point x has
|M^j x + k|_inf <= R}; using the union over the whole window (rather than a
per-point cut) keeps far-field cancellation in slowly decaying sinc tails
and makes results deterministic.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .kernels import eval_sinc

__all__ = ["EvalGrid", "TruncationPolicy", "OperatorResult", "lattice_set",
           "quasi_projection", "kantorovich_1d", "generalized_sampling",
           "fourier_side_projection"]

IMAG_TOL = 1e-8


@dataclass(frozen=True)
class EvalGrid:
    """Uniform tensor grid over an axis-aligned window."""
    window: tuple  # ((lo, hi), ...) per axis
    points_per_axis: int

    def __post_init__(self):
        for lo, hi in self.window:
            if hi <= lo:
                raise ValueError("window must satisfy lo < hi")
        if self.points_per_axis < 2:
            raise ValueError("need at least 2 points per axis")

    @property
    def dim(self):
        return len(self.window)

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dim

    @property
    def spacing(self):
        return np.array([(hi - lo) / (self.points_per_axis - 1)
                         for lo, hi in self.window])

    @property
    def points(self):
        axes = [np.linspace(lo, hi, self.points_per_axis)
                for lo, hi in self.window]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dim)


@dataclass(frozen=True)
class TruncationPolicy:
    mode: str = "radius"  # "radius" or "tail_tol"
    radius: float = 64.0
    tail_tol: float = 1e-9
    cap: int = 4_000_000

    def __post_init__(self):
        if self.mode not in ("radius", "tail_tol"):
            raise ValueError("unknown truncation mode %r" % self.mode)


@dataclass
class OperatorResult:
    values: np.ndarray  # grid shape
    grid: EvalGrid
    meta: dict = field(default_factory=dict)


def lattice_set(M, j, grid, trunc):
    """Integer k with |M^j x + k|_inf <= R for some grid point x."""
    img = grid.points @ M.power(j).T
    lo = np.floor(-img.max(axis=0) - trunc.radius).astype(int)
    hi = np.ceil(-img.min(axis=0) + trunc.radius).astype(int)
    count = int(np.prod(hi - lo + 1))
    if count > trunc.cap:
        raise RuntimeError("truncated lattice of %d points exceeds cap %d"
                           % (count, trunc.cap))
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, M.dim)


def _apply_tail_tol(ks, coeffs, trunc):
    """Drop the smallest coefficients whose summed modulus stays below tol."""
    order = np.argsort(np.abs(coeffs))
    csum = np.cumsum(np.abs(coeffs[order]))
    ndrop = int(np.searchsorted(csum, trunc.tail_tol, side="right"))
    keep = np.sort(order[ndrop:])
    tail = float(csum[ndrop - 1]) if ndrop > 0 else 0.0
    return ks[keep], coeffs[keep], tail


def _accumulate(kernel, M, j, ks, coeffs, grid, chunk=512):
    pts = grid.points
    base = pts @ M.power(j).T
    out = np.zeros(len(pts), dtype=complex)
    for start in range(0, len(ks), chunk):
        kc = ks[start:start + chunk].astype(float)
        cc = coeffs[start:start + chunk]
        args = base[None, :, :] + kc[:, None, :]
        out += cc @ np.asarray(kernel(args))
    if np.max(np.abs(out.imag), initial=0.0) > IMAG_TOL:
        raise ValueError("operator output has non-negligible imaginary part")
    return out.real.reshape(grid.shape)


def quasi_projection(f, kernel, averager, M, j, grid, trunc, qspec):
    """Q_j f on the grid: sum_k c_jk(f) phi(M^j x + k) over the truncated set."""
    if j < 0:
        raise ValueError("j must be non-negative")
    ks = lattice_set(M, j, grid, trunc)
    coeffs = quadrature.coefficients(f, averager, M, j, ks, qspec)
    if not np.all(np.isfinite(coeffs)):
        raise ValueError("non-finite analysis coefficients")
    tail = _boundary_tail(ks, coeffs)
    if trunc.mode == "tail_tol":
        ks, coeffs, dropped = _apply_tail_tol(ks, coeffs, trunc)
        tail = max(tail, dropped)
    values = _accumulate(kernel, M, j, ks, coeffs, grid)
    return OperatorResult(values, grid, {
        "n_terms": len(ks), "tail_estimate": tail, "j": j})


def _boundary_tail(ks, coeffs):
    """Sum of |c| on the outermost lattice shell: a cheap surrogate for the
    mass the truncation radius is about to cut off."""
    if len(ks) == 0:
        return 0.0
    outer = np.zeros(len(ks), dtype=bool)
    for axis in range(ks.shape[1]):
        outer |= (ks[:, axis] == ks[:, axis].min())
        outer |= (ks[:, axis] == ks[:, axis].max())
    return float(np.sum(np.abs(coeffs[outer])))


def _cell_integrals(f, w, kmin, kmax, qspec):
    """w * int_{k/w}^{(k+1)/w} f  for k = kmin..kmax (exact when f carries an
    antiderivative)."""
    ks = np.arange(kmin, kmax + 1)
    anti = getattr(f, "antiderivative", None)
    if anti is not None:
        return w * (anti((ks + 1) / w) - anti(ks / w)), ks
    q, gw = np.polynomial.legendre.leggauss(qspec.nodes_per_axis)
    # map GL nodes into each cell
    mid = (ks + 0.5) / w
    half = 0.5 / w
    pts = mid[:, None] + half * q[None, :]
    vals = np.asarray(f(pts[..., None]))
    return w * (vals @ (half * gw)), ks


def kantorovich_1d(f, w, kernel, grid, trunc, qspec=None):
    """K_w f(x) = sum_k (w int_{k/w}^{(k+1)/w} f) phi(w x - k)."""
    if grid.dim != 1 or kernel.dim != 1:
        raise ValueError("kantorovich_1d is one-dimensional")
    if w <= 0:
        raise ValueError("w must be positive")
    qspec = qspec or quadrature.QuadratureSpec()
    lo, hi = grid.window[0]
    kmin = int(math.floor(w * lo - trunc.radius))
    kmax = int(math.ceil(w * hi + trunc.radius))
    coeffs, ks = _cell_integrals(f, w, kmin, kmax, qspec)
    x = grid.points[:, 0]
    out = np.zeros(len(x))
    for start in range(0, len(ks), 1024):
        kc = ks[start:start + 1024]
        cc = coeffs[start:start + 1024]
        args = (w * x[None, :] - kc[:, None])[..., None]
        out += np.real(cc @ np.asarray(kernel(args)))
    return OperatorResult(out.reshape(grid.shape), grid,
                          {"n_terms": len(ks), "w": w})


def generalized_sampling(f, w, kernel, grid, trunc, jitter=0.0):
    """S_w f(x) = sum_k f(k/w + jitter) phi(w x - k)."""
    if grid.dim != 1 or kernel.dim != 1:
        raise ValueError("generalized_sampling is one-dimensional")
    lo, hi = grid.window[0]
    ks = np.arange(int(math.floor(w * lo - trunc.radius)),
                   int(math.ceil(w * hi + trunc.radius)) + 1)
    samples = np.asarray(f((ks / w + jitter)[:, None]))
    x = grid.points[:, 0]
    out = np.zeros(len(x))
    for start in range(0, len(ks), 1024):
        kc = ks[start:start + 1024]
        sc = samples[start:start + 1024]
        args = (w * x[None, :] - kc[:, None])[..., None]
        out += sc @ np.asarray(kernel(args))
    return OperatorResult(out.reshape(grid.shape), grid,
                          {"n_terms": len(ks), "w": w, "jitter": jitter})


def fourier_side_projection(f, M, j, grid, trunc, qspec):
    """sum_k (m^j int_box fhat(M*^j xi) e^{-2 pi i (k, xi)} dxi) sinc(M^j x + k)."""
    ks = lattice_set(M, j, grid, trunc)
    coeffs = quadrature.fourier_coefficients(f, M, j, ks, qspec)
    tail = _boundary_tail(ks, coeffs)
    if trunc.mode == "tail_tol":
        ks, coeffs, dropped = _apply_tail_tol(ks, coeffs, trunc)
        tail = max(tail, dropped)
    values = _accumulate(eval_sinc, M, j, ks, coeffs, grid)
    return OperatorResult(values, grid, {
        "n_terms": len(ks), "tail_estimate": tail, "j": j})
