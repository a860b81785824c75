"""Analysis coefficients of the sampling operators.

Computes c_jk(f) = m^j int f(u) conj(avg(M^j u + k)) du for box, ball, and
shifted-combination averagers, and the frequency-side coefficients
m^j int_box fhat(M*^j xi) e^{-2 pi i (k, xi)} dxi of the Kotelnikov route.

Indicator discontinuities never cross a panel: rules integrate exactly over
the support, so Gauss-Legendre keeps spectral accuracy.  Oscillatory
frequency-side integrands are subdivided so each panel sees a bounded number
of cycles.
"""

import math
from dataclasses import dataclass

import numpy as np

from .kernels import BallIndicator, BoxIndicator, ShiftedCombo, SincAverager

__all__ = ["QuadratureSpec", "BudgetExceededError", "coefficient",
           "coefficients", "fourier_coefficient", "fourier_coefficients",
           "fourier_coefficient_spatial"]


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_axis: int = 24
    subdivisions: int = 2
    radial_nodes: int = 32
    angular_nodes: int = 64
    budget: int = 4_000_000  # max nodes per coefficient batch element

    def __post_init__(self):
        if self.nodes_per_axis < 2:
            raise ValueError("nodes_per_axis must be >= 2")


def _gauss_1d(lo, hi, nodes, panels):
    """GL nodes/weights over [lo, hi] split into the given panel edges."""
    q, w = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    for a, b in panels:
        half = 0.5 * (b - a)
        xs.append(half * q + 0.5 * (a + b))
        ws.append(half * w)
    return np.concatenate(xs), np.concatenate(ws)


def _uniform_panels(lo, hi, count):
    edges = np.linspace(lo, hi, count + 1)
    return list(zip(edges[:-1], edges[1:]))


def _split_panels(panels, freq, nodes, max_cycles=3.0):
    """Refine panels so each spans at most max_cycles oscillation cycles."""
    out = []
    for a, b in panels:
        cycles = abs(freq) * (b - a)
        parts = max(1, int(math.ceil(cycles / max_cycles)))
        edges = np.linspace(a, b, parts + 1)
        out.extend(zip(edges[:-1], edges[1:]))
    return out


def box_rule(lo, hi, spec):
    """Tensor Gauss-Legendre rule over a box; weights sum to its measure."""
    axes = [_gauss_1d(a, b, spec.nodes_per_axis,
                      _uniform_panels(a, b, spec.subdivisions))
            for a, b in zip(np.atleast_1d(lo), np.atleast_1d(hi))]
    mesh_x = np.meshgrid(*[ax[0] for ax in axes], indexing="ij")
    mesh_w = np.meshgrid(*[ax[1] for ax in axes], indexing="ij")
    pts = np.stack(mesh_x, axis=-1).reshape(-1, len(axes))
    w = np.prod(np.stack(mesh_w, axis=-1), axis=-1).reshape(-1)
    return pts, w


def ball_rule(radius, spec, dim=2):
    """Polar rule for the disc: GL in r^2 (absorbs the Jacobian exactly),
    equally spaced angles (spectrally accurate for periodic integrands)."""
    if dim != 2:
        raise NotImplementedError("ball quadrature implemented for d=2")
    s, ws = _gauss_1d(0.0, radius ** 2, spec.radial_nodes, [(0.0, radius ** 2)])
    r = np.sqrt(s)
    na = spec.angular_nodes
    theta = 2.0 * np.pi * np.arange(na) / na
    wt = 2.0 * np.pi / na
    R, TH = np.meshgrid(r, theta, indexing="ij")
    pts = np.stack([R * np.cos(TH), R * np.sin(TH)], axis=-1).reshape(-1, 2)
    w = (np.repeat(0.5 * ws, na) * wt)
    return pts, w


def _indicator_rule(averager, spec):
    if isinstance(averager, BoxIndicator):
        return box_rule(averager.lo, averager.hi, spec)
    if isinstance(averager, BallIndicator):
        return ball_rule(averager.radius, spec, averager.dim)
    raise TypeError("no quadrature rule for %r" % type(averager))


def coefficients(f, averager, M, j, ks, spec, chunk=2048):
    """Batch of c_jk over lattice points ks, shape (K, d) -> complex (K,).

    c_jk = m^j <f, avg(M^j . + k)> = mean of f over M^-j(supp - k) for
    normalized indicators.
    """
    ks = np.atleast_2d(np.asarray(ks, dtype=float))
    if isinstance(averager, ShiftedCombo):
        out = np.zeros(len(ks), dtype=complex)
        for l, b in sorted(averager.Q.coeffs.items()):
            out += np.conj(b) * coefficients(
                f, averager.base, M, j, ks + np.asarray(l, dtype=float),
                spec, chunk)
        return out
    if isinstance(averager, SincAverager):
        # band-limited analysis function: pair through frequency space,
        # via the box-localized inverse-transform samples (the route
        # independent of fourier_coefficients)
        if getattr(f, "fourier", None) is None:
            raise ValueError("sinc averager requires a closed-form transform")
        factors = getattr(f, "fourier_factors", None)
        Mj = M.power(j)
        if factors is not None and np.allclose(Mj, np.diag(np.diag(Mj))):
            out = np.ones(len(ks), dtype=complex)
            for axis in range(M.dim):
                vals = {}
                for kv in np.unique(ks[:, axis]):
                    vals[kv] = _spatial_axis_integral(
                        factors[axis], f, Mj[axis, axis], kv, spec)
                out *= np.array([vals[kv] for kv in ks[:, axis]])
            return out
        return np.array([fourier_coefficient_spatial(f, M, j, k, spec)
                         for k in ks])

    # exact 1-D cell means when an antiderivative is available
    anti = getattr(f, "antiderivative", None)
    if (anti is not None and M.dim == 1 and isinstance(averager, BoxIndicator)):
        s = float(M.power(-j)[0, 0])
        a = s * (averager.lo[0] - ks[:, 0])
        b = s * (averager.hi[0] - ks[:, 0])
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        return ((anti(hi) - anti(lo)) / (hi - lo)).astype(complex)

    pts, w = _indicator_rule(averager, spec)
    if len(pts) > spec.budget:
        raise BudgetExceededError("quadrature rule of %d nodes exceeds budget"
                                  % len(pts))
    w = w / averager.measure  # mean weights
    Minv = M.power(-j)
    out = np.empty(len(ks), dtype=complex)
    for start in range(0, len(ks), chunk):
        kc = ks[start:start + chunk]
        args = (pts[None, :, :] - kc[:, None, :]) @ Minv.T
        vals = np.asarray(f(args))
        out[start:start + chunk] = vals @ w
    return out


def coefficient(f, averager, M, j, k, spec):
    """Single analysis coefficient c_jk."""
    c = coefficients(f, averager, M, j, np.atleast_2d(k), spec)[0]
    bad = not np.isfinite(c.real) or not np.isfinite(c.imag)
    if bad:
        raise ValueError("evaluation of f produced a non-finite coefficient")
    return complex(c)


# ----------------------------------------------------------------------------
# frequency-side coefficients

def _axis_panels_for_fourier(f, M, j, axis, kval, spec):
    """Panels on [-1/2, 1/2] for the axis integral of fhat(M*^j xi) e^{-2pi i k xi}."""
    panels = _uniform_panels(-0.5, 0.5, spec.subdivisions)
    scale = None
    Mj = M.power(j)
    if np.allclose(Mj, np.diag(np.diag(Mj))):
        scale = Mj[axis, axis]
    breakpoints = getattr(f, "fourier_breakpoints", ()) or ()
    band = getattr(f, "band_limit", None)
    if scale is not None and (breakpoints or band is not None):
        cuts = set()
        for bp in breakpoints:
            t = bp / scale
            if -0.5 < t < 0.5:
                cuts.add(t)
        lo, hi = -0.5, 0.5
        if band is not None:
            lo = max(lo, -abs(band / scale))
            hi = min(hi, abs(band / scale))
        edges = sorted({lo, hi} | {c for c in cuts if lo < c < hi})
        panels = list(zip(edges[:-1], edges[1:]))
    return _split_panels(panels, kval, spec.nodes_per_axis)


def fourier_coefficients(f, M, j, ks, spec):
    """Batch of  m^j int_box fhat(M*^j xi) e^{-2 pi i (k, xi)} dxi."""
    fhat = getattr(f, "fourier", f)
    factors = getattr(f, "fourier_factors", None)
    ks = np.atleast_2d(np.asarray(ks, dtype=float))
    d = M.dim
    mj = M.det_abs ** j
    Mj = M.power(j)
    diag = np.allclose(Mj, np.diag(np.diag(Mj)))
    if factors is not None and diag and d > 1:
        # tensor transform over a diagonal dilation: product of 1-D integrals
        out = np.full(len(ks), mj, dtype=complex)
        for axis in range(d):
            vals = {}
            for kv in np.unique(ks[:, axis]):
                panels = _axis_panels_for_fourier(f, M, j, axis, kv, spec)
                x, w = _gauss_1d(0, 0, spec.nodes_per_axis, panels)
                integrand = (factors[axis](Mj[axis, axis] * x)
                             * np.exp(-2j * np.pi * kv * x))
                vals[kv] = np.dot(integrand, w)
            out *= np.array([vals[kv] for kv in ks[:, axis]])
        return out

    out = np.empty(len(ks), dtype=complex)
    MjT = Mj.T
    for i, k in enumerate(ks):
        axes = []
        for axis in range(d):
            panels = _axis_panels_for_fourier(f, M, j, axis, k[axis], spec)
            axes.append(_gauss_1d(0, 0, spec.nodes_per_axis, panels))
        mesh_x = np.meshgrid(*[ax[0] for ax in axes], indexing="ij")
        mesh_w = np.meshgrid(*[ax[1] for ax in axes], indexing="ij")
        pts = np.stack(mesh_x, axis=-1).reshape(-1, d)
        w = np.prod(np.stack(mesh_w, axis=-1), axis=-1).reshape(-1)
        if len(pts) > spec.budget:
            raise BudgetExceededError("oscillatory rule exceeds budget")
        vals = np.asarray(fhat(pts @ MjT)) * np.exp(-2j * np.pi * (pts @ k))
        out[i] = mj * np.dot(vals, w)
    return out


def fourier_coefficient(f, M, j, k, spec):
    return complex(fourier_coefficients(f, M, j, np.atleast_2d(k), spec)[0])


def _spatial_axis_integral(factor, f, scale, k, spec):
    """One axis of the box-localized inverse transform at y = -k/scale:
    int over [-scale/2, scale/2] (band/kink-cut) of factor(t) e^{2 pi i t y}."""
    half = abs(scale) / 2.0
    lo, hi = -half, half
    band = getattr(f, "band_limit", None)
    if band is not None:
        lo, hi = max(lo, -band), min(hi, band)
    cuts = {bp for bp in (getattr(f, "fourier_breakpoints", ()) or ())
            if lo < bp < hi}
    edges = sorted({lo, hi} | cuts)
    y = -k / scale
    panels = []
    for a, b in zip(edges[:-1], edges[1:]):
        parts = max(spec.subdivisions, int(math.ceil((b - a) / 1.0)))
        sub = np.linspace(a, b, parts + 1)
        panels.extend(zip(sub[:-1], sub[1:]))
    panels = _split_panels(panels, y, spec.nodes_per_axis)
    x, w = _gauss_1d(0, 0, spec.nodes_per_axis, panels)
    return complex(np.dot(np.asarray(factor(x)) * np.exp(2j * np.pi * x * y),
                          w))


def fourier_coefficient_spatial(f, M, j, k, spec):
    """Independent route: inverse transform of the box-localized spectrum,
    sampled at -M*^-j k (equals fourier_coefficient analytically).

    Implemented for diagonal dilations: integrates fhat e^{2 pi i (xi, y)}
    over the dilated box M*^j [-1/2, 1/2]^d directly.
    """
    fhat = getattr(f, "fourier", f)
    Mj = M.power(j)
    if not np.allclose(Mj, np.diag(np.diag(Mj))):
        raise NotImplementedError("spatial route requires a diagonal dilation")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    y = -np.linalg.solve(Mj.T, k)
    d = M.dim
    axes = []
    breakpoints = getattr(f, "fourier_breakpoints", ()) or ()
    band = getattr(f, "band_limit", None)
    for axis in range(d):
        half = abs(Mj[axis, axis]) / 2.0
        lo, hi = -half, half
        cuts = set()
        if band is not None:
            lo, hi = max(lo, -band), min(hi, band)
        for bp in breakpoints:
            if lo < bp < hi:
                cuts.add(bp)
        edges = sorted({lo, hi} | cuts)
        panels = []
        for a, b in zip(edges[:-1], edges[1:]):
            # cap panel width so node density matches the unit-box route
            parts = max(spec.subdivisions, int(math.ceil((b - a) / 1.0)))
            sub = np.linspace(a, b, parts + 1)
            panels.extend(zip(sub[:-1], sub[1:]))
        panels = _split_panels(panels, y[axis], spec.nodes_per_axis)
        axes.append(_gauss_1d(0, 0, spec.nodes_per_axis, panels))
    mesh_x = np.meshgrid(*[ax[0] for ax in axes], indexing="ij")
    mesh_w = np.meshgrid(*[ax[1] for ax in axes], indexing="ij")
    pts = np.stack(mesh_x, axis=-1).reshape(-1, d)
    w = np.prod(np.stack(mesh_w, axis=-1), axis=-1).reshape(-1)
    vals = np.asarray(fhat(pts)) * np.exp(2j * np.pi * (pts @ y))
    return complex(np.dot(vals, w))
