"""Reconstruction kernels and averaging functions.

Kernels (the synthesis side) are band-limited: a trigonometric polynomial
times the unit-box indicator in frequency, a Fejer-type squared sinc, or a
Bochner-Riesz radial symbol.  Averagers (the analysis side) are normalized
indicators of boxes and balls, finite shifted combinations of them, or the
sinc function itself.

All evaluation is pure and vectorized over a trailing axis of length d.
Frequency convention: F f(xi) = int f(x) exp(-2 pi i (x, xi)) dx.
"""

import json
import math

import numpy as np
from scipy.special import gamma as _gamma, jv as _besselj

__all__ = [
    "eval_sinc", "TrigPolynomial", "Kernel", "SincCombo", "SincSquared",
    "BochnerRiesz", "Averager", "BoxIndicator", "BallIndicator",
    "ShiftedCombo", "SincAverager", "plain_sinc", "kernel_to_json",
    "kernel_from_json", "averager_to_json", "averager_from_json",
]

TWO_PI_I = 2j * np.pi
IMAG_TOL = 1e-10
TAYLOR_DEPTH = 16  # 1-D series length kept for closed-form moment tables


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        if dim != 1:
            raise ValueError("scalar input for %d-dimensional function" % dim)
        return x.reshape(1)
    if x.shape[-1] != dim:
        raise ValueError("expected trailing axis of length %d, got shape %s"
                         % (dim, x.shape))
    return x


def eval_sinc(x):
    """Tensor sinc: prod_nu sin(pi x_nu)/(pi x_nu), with x of shape (..., d)."""
    x = np.asarray(x, dtype=float)
    return np.prod(np.sinc(x), axis=-1)


class TrigPolynomial:
    """Finite sum  sum_l a_l exp(2 pi i (l, xi))  over integer lattice points."""

    def __init__(self, coeffs, dim):
        self.dim = dim
        self.coeffs = {tuple(int(c) for c in l): complex(a)
                       for l, a in coeffs.items()}

    def __call__(self, xi):
        xi = _as_points(xi, self.dim)
        out = np.zeros(xi.shape[:-1], dtype=complex)
        for l, a in self.coeffs.items():
            out += a * np.exp(TWO_PI_I * (xi @ np.asarray(l, dtype=float)))
        return out

    def derivative_at_zero(self, alpha):
        """D^alpha at xi = 0, exactly: sum_l a_l prod (2 pi i l_nu)^alpha_nu."""
        total = 0.0 + 0.0j
        for l, a in self.coeffs.items():
            term = a
            for lnu, anu in zip(l, alpha):
                term *= (TWO_PI_I * lnu) ** anu
            total += term
        return total

    def conjugate(self):
        return TrigPolynomial(
            {tuple(-c for c in l): np.conj(a) for l, a in self.coeffs.items()},
            self.dim)

    def __eq__(self, other):
        return (isinstance(other, TrigPolynomial) and self.dim == other.dim
                and self.coeffs == other.coeffs)

    def __repr__(self):
        return "TrigPolynomial(%r, dim=%d)" % (self.coeffs, self.dim)


# ----------------------------------------------------------------------------
# small series helpers for closed-form derivative tables

def _series_exp(c, depth=TAYLOR_DEPTH):
    """Taylor coefficients of exp(c t)."""
    return np.array([c ** m / math.factorial(m) for m in range(depth)],
                    dtype=complex)


def _series_sinc(w, depth=TAYLOR_DEPTH):
    """Taylor coefficients of sin(pi w t)/(pi w t)."""
    out = np.zeros(depth, dtype=complex)
    for m in range(0, depth, 2):
        out[m] = (-1) ** (m // 2) * (np.pi * w) ** m / math.factorial(m + 1)
    return out


def _series_mul(a, b):
    depth = len(a)
    out = np.zeros(depth, dtype=complex)
    for m in range(depth):
        out[m] = np.dot(a[:m + 1], b[:m + 1][::-1])
    return out


def _radial_deriv(s_coeffs, alpha):
    """D^alpha at 0 of  sum_m c_m |xi|^(2m),  s_coeffs[m] = c_m."""
    if any(a % 2 for a in alpha):
        return 0.0 + 0.0j
    gam = [a // 2 for a in alpha]
    m = sum(gam)
    if m >= len(s_coeffs):
        return 0.0 + 0.0j
    multinom = math.factorial(m)
    for g in gam:
        multinom //= math.factorial(g)
    fact = 1.0
    for a in alpha:
        fact *= math.factorial(a)
    return s_coeffs[m] * multinom * fact


# ----------------------------------------------------------------------------
# kernels

class Kernel:
    """Base class: point evaluation + closed-form frequency symbol."""

    dim = 1
    decay_class = "summable"
    freq_support_radius = np.inf

    def __call__(self, x):
        raise NotImplementedError

    def fourier(self, xi):
        raise NotImplementedError

    def taylor_deriv(self, alpha):
        """D^alpha of the symbol at 0, or None when no closed form exists."""
        return None


class SincCombo(Kernel):
    """phi(x) = sum_l a_l sinc(x + l); symbol T(xi) on the unit box."""

    decay_class = "sinc"  # ~ 1/|x_nu| per axis, not summable

    def __init__(self, T):
        self.T = T
        self.dim = T.dim
        self.freq_support_radius = 0.5 * math.sqrt(self.dim)

    def __call__(self, x):
        x = _as_points(x, self.dim)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for l, a in self.T.coeffs.items():
            out += a * eval_sinc(x + np.asarray(l, dtype=float))
        if np.max(np.abs(out.imag), initial=0.0) > IMAG_TOL:
            raise ValueError("kernel evaluation has non-negligible imaginary part")
        return out.real

    def fourier(self, xi):
        xi = _as_points(xi, self.dim)
        inside = np.all(np.abs(xi) <= 0.5, axis=-1)
        return np.where(inside, self.T(xi), 0.0)

    def taylor_deriv(self, alpha):
        return self.T.derivative_at_zero(alpha)


def plain_sinc(dim=1):
    """The tensor sinc kernel (T identically 1)."""
    return SincCombo(TrigPolynomial({(0,) * dim: 1.0}, dim))


class SincSquared(Kernel):
    """Fejer-type kernel prod_nu (1/2) sinc^2(x_nu / 2); symbol prod (1-2|xi_nu|)_+.

    The symbol is kinked at 0, so no derivative table is exposed; the kernel
    provides approximation order 1 only.
    """

    decay_class = "summable"

    def __init__(self, dim=1):
        self.dim = dim
        self.freq_support_radius = 0.5 * math.sqrt(dim)

    def __call__(self, x):
        x = _as_points(x, self.dim)
        return np.prod(0.5 * np.sinc(x / 2.0) ** 2, axis=-1)

    def fourier(self, xi):
        xi = _as_points(xi, self.dim)
        return np.prod(np.maximum(1.0 - 2.0 * np.abs(xi), 0.0), axis=-1)


class BochnerRiesz(Kernel):
    """Radial kernel with frequency symbol (1 - |xi|^2)_+^delta."""

    decay_class = "summable"

    def __init__(self, delta, dim=2):
        if delta <= 0:
            raise ValueError("delta must be positive")
        self.delta = float(delta)
        self.dim = dim
        self.freq_support_radius = 1.0

    def __call__(self, x):
        x = _as_points(x, self.dim)
        r = np.sqrt(np.sum(x * x, axis=-1))
        nu = self.dim / 2.0 + self.delta
        limit = _gamma(1 + self.delta) * np.pi ** (self.dim / 2.0) / _gamma(nu + 1)
        r_safe = np.where(r < 1e-8, 1.0, r)
        vals = (_gamma(1 + self.delta) * np.pi ** (-self.delta)
                * _besselj(nu, 2.0 * np.pi * r_safe) / r_safe ** nu)
        return np.where(r < 1e-8, limit, vals)

    def fourier(self, xi):
        xi = _as_points(xi, self.dim)
        s = np.sum(xi * xi, axis=-1)
        return np.maximum(1.0 - s, 0.0) ** self.delta

    def taylor_deriv(self, alpha):
        # binomial series (1 - s)^delta = sum_m binom(delta, m) (-s)^m
        depth = sum(alpha) // 2 + 2
        coeffs = np.zeros(depth, dtype=complex)
        c = 1.0
        for m in range(depth):
            coeffs[m] = c * (-1) ** m
            c *= (self.delta - m) / (m + 1)
        return _radial_deriv(coeffs, alpha)


# ----------------------------------------------------------------------------
# averagers

class Averager:
    """Base class for analysis functions phi-tilde."""

    dim = 1
    measure = 1.0
    support_radius = np.inf
    compact = True

    def __call__(self, x):
        raise NotImplementedError

    def fourier(self, xi):
        raise NotImplementedError

    def taylor_deriv(self, alpha):
        return None


class BoxIndicator(Averager):
    """Normalized indicator of the box prod [lo_nu, hi_nu]."""

    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise ValueError("box must satisfy lo < hi componentwise")
        self.dim = len(self.lo)
        self.measure = float(np.prod(self.hi - self.lo))
        self.support_radius = float(np.linalg.norm(
            np.maximum(np.abs(self.lo), np.abs(self.hi))))
        # per-axis Taylor series of exp(-pi i (a+b) t) * sinc((b-a) t)
        self._axis_series = [
            _series_mul(_series_exp(-1j * np.pi * (a + b)), _series_sinc(b - a))
            for a, b in zip(self.lo, self.hi)]

    def __call__(self, x):
        x = _as_points(x, self.dim)
        inside = np.all((x >= self.lo) & (x <= self.hi), axis=-1)
        return np.where(inside, 1.0 / self.measure, 0.0)

    def fourier(self, xi):
        xi = _as_points(xi, self.dim)
        out = np.ones(xi.shape[:-1], dtype=complex)
        for nu in range(self.dim):
            a, b = self.lo[nu], self.hi[nu]
            t = xi[..., nu]
            out = out * np.exp(-1j * np.pi * (a + b) * t) * np.sinc((b - a) * t)
        return out

    def taylor_deriv(self, alpha):
        val = 1.0 + 0.0j
        for nu, a in enumerate(alpha):
            if a >= TAYLOR_DEPTH:
                return None
            val *= self._axis_series[nu][a] * math.factorial(a)
        return val


class BallIndicator(Averager):
    """Normalized indicator of the ball B_r in R^d."""

    def __init__(self, radius=1.0, dim=2):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.dim = dim
        self.measure = float(np.pi ** (dim / 2.0) / _gamma(1 + dim / 2.0)
                             * radius ** dim)
        self.support_radius = self.radius

    def __call__(self, x):
        x = _as_points(x, self.dim)
        r = np.sqrt(np.sum(x * x, axis=-1))
        return np.where(r <= self.radius, 1.0 / self.measure, 0.0)

    def fourier(self, xi):
        # Gamma(1+d/2) J_{d/2}(2 pi r |xi|) / (pi r |xi|)^{d/2}, value 1 at 0
        xi = _as_points(xi, self.dim)
        s = np.sqrt(np.sum(xi * xi, axis=-1))
        nu = self.dim / 2.0
        s_safe = np.where(s < 1e-10, 1.0, s)
        vals = (_gamma(1 + nu) * _besselj(nu, 2.0 * np.pi * self.radius * s_safe)
                / (np.pi * self.radius * s_safe) ** nu)
        return np.where(s < 1e-10, 1.0, vals) + 0.0j

    def taylor_deriv(self, alpha):
        depth = sum(alpha) // 2 + 2
        nu = self.dim / 2.0
        coeffs = np.array(
            [(-1) ** m * _gamma(1 + nu) * (np.pi * self.radius) ** (2 * m)
             / (math.factorial(m) * _gamma(m + 1 + nu)) for m in range(depth)],
            dtype=complex)
        return _radial_deriv(coeffs, alpha)


class ShiftedCombo(Averager):
    """Finite shifted combination  sum_l b_l base(x + l).

    Frequency symbol: Q(xi) * base.fourier(xi) with Q = sum b_l e^{2 pi i (l, xi)}.
    """

    def __init__(self, base, coeffs):
        self.base = base
        self.dim = base.dim
        if isinstance(coeffs, TrigPolynomial):
            self.Q = coeffs
        else:
            self.Q = TrigPolynomial(coeffs, self.dim)
        if self.Q.dim != self.dim:
            raise ValueError("coefficient lattice dimension mismatch")
        self.measure = base.measure
        shift = max((np.linalg.norm(l) for l in self.Q.coeffs), default=0.0)
        self.support_radius = base.support_radius + shift

    def __call__(self, x):
        x = _as_points(x, self.dim)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for l, b in self.Q.coeffs.items():
            out += b * self.base(x + np.asarray(l, dtype=float))
        if np.max(np.abs(out.imag), initial=0.0) > IMAG_TOL:
            return out
        return out.real

    def fourier(self, xi):
        return self.Q(xi) * self.base.fourier(xi)

    def taylor_deriv(self, alpha):
        total = 0.0 + 0.0j
        for gam in _sub_multi_indices(alpha):
            base_d = self.base.taylor_deriv(tuple(a - g for a, g in zip(alpha, gam)))
            if base_d is None:
                return None
            total += (_binom_multi(alpha, gam) * self.Q.derivative_at_zero(gam)
                      * base_d)
        return total


class SincAverager(Averager):
    """The sinc function used on the analysis side (band-limited, not compact).

    Coefficients against it are computed through frequency space; see the
    quadrature module.
    """

    compact = False

    def __init__(self, dim=1):
        self.dim = dim
        self.measure = 1.0
        self.support_radius = np.inf

    def __call__(self, x):
        return eval_sinc(_as_points(x, self.dim))

    def fourier(self, xi):
        xi = _as_points(xi, self.dim)
        return np.where(np.all(np.abs(xi) <= 0.5, axis=-1), 1.0, 0.0) + 0.0j

    def taylor_deriv(self, alpha):
        return 1.0 + 0.0j if sum(alpha) == 0 else 0.0 + 0.0j


def _sub_multi_indices(alpha):
    ranges = [range(a + 1) for a in alpha]
    out = [()]
    for r in ranges:
        out = [t + (i,) for t in out for i in r]
    return out


def _binom_multi(beta, alpha):
    v = 1
    for b, a in zip(beta, alpha):
        v *= math.comb(b, a)
    return v


# ----------------------------------------------------------------------------
# JSON serialization (bit-exact: floats carried as shortest round-trip repr)

def _coeffs_rows(tp):
    rows = [[*l, a.real, a.imag] for l, a in sorted(tp.coeffs.items())]
    return rows


def _coeffs_from_rows(rows, dim):
    return TrigPolynomial(
        {tuple(int(v) for v in row[:dim]): complex(row[dim], row[dim + 1])
         for row in rows}, dim)


def kernel_to_json(k):
    if isinstance(k, SincCombo):
        doc = {"variant": "sinc_combo", "dim": k.dim,
               "coefficients": _coeffs_rows(k.T)}
    elif isinstance(k, SincSquared):
        doc = {"variant": "sinc_squared", "dim": k.dim}
    elif isinstance(k, BochnerRiesz):
        doc = {"variant": "bochner_riesz", "dim": k.dim, "delta": k.delta}
    else:
        raise TypeError("unknown kernel type %r" % type(k))
    return json.dumps(doc)


def kernel_from_json(s):
    doc = json.loads(s)
    v = doc["variant"]
    if v == "sinc_combo":
        return SincCombo(_coeffs_from_rows(doc["coefficients"], doc["dim"]))
    if v == "sinc_squared":
        return SincSquared(doc["dim"])
    if v == "bochner_riesz":
        return BochnerRiesz(doc["delta"], doc["dim"])
    raise ValueError("unknown kernel variant %r" % v)


def averager_to_json(a):
    if isinstance(a, BoxIndicator):
        doc = {"variant": "box", "lo": list(a.lo), "hi": list(a.hi)}
    elif isinstance(a, BallIndicator):
        doc = {"variant": "ball", "dim": a.dim, "radius": a.radius}
    elif isinstance(a, ShiftedCombo):
        doc = {"variant": "shifted", "base": json.loads(averager_to_json(a.base)),
               "coefficients": _coeffs_rows(a.Q)}
    elif isinstance(a, SincAverager):
        doc = {"variant": "sinc", "dim": a.dim}
    else:
        raise TypeError("unknown averager type %r" % type(a))
    return json.dumps(doc)


def averager_from_json(s):
    doc = json.loads(s) if isinstance(s, str) else s
    v = doc["variant"]
    if v == "box":
        return BoxIndicator(doc["lo"], doc["hi"])
    if v == "ball":
        return BallIndicator(doc["radius"], doc["dim"])
    if v == "shifted":
        base = averager_from_json(json.dumps(doc["base"]))
        return ShiftedCombo(base, _coeffs_from_rows(doc["coefficients"], base.dim))
    if v == "sinc":
        return SincAverager(doc["dim"])
    raise ValueError("unknown averager variant %r" % v)
