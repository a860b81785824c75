"""Synthesis of kernels and averagers of prescribed approximation order.

The order-n machinery: the interpolatory trigonometric polynomials g_k,
the correction polynomials T and Q built from moment tables of frequency
symbols at the origin, and the moment-defect oracle that certifies
D^beta(1 - phi_hat * conj(avg_hat))(0) = 0 for all [beta] < n.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .kernels import (SincCombo, SincSquared, TrigPolynomial, _binom_multi,
                      _sub_multi_indices)

__all__ = [
    "MomentTable", "SynthesisError", "multi_indices", "make_g",
    "moment_table", "solve_T", "assemble_T", "synthesize_kernel", "solve_Q",
    "shifted_combo_averager", "moment_defect", "check_strict_compatibility",
]

MAX_ORDER = 8
DEFECT_TOL = 1e-8
FD_BASE_STEP = 2.0 ** -6


class SynthesisError(RuntimeError):
    pass


def multi_indices(dim, n):
    """All alpha in Z_+^d with [alpha] < n, ordered by total degree."""
    out = [()]
    for _ in range(dim):
        out = [t + (i,) for t in out for i in range(n)]
    out = [a for a in out if sum(a) < n]
    out.sort(key=lambda a: (sum(a), a))
    return out


# ----------------------------------------------------------------------------
# g_k polynomials

def make_g(k, n):
    """The 1-D trig polynomial on exponents {0..n-1} with d^m g_k(0) = delta_km.

    Solved exactly: with g(t) = sum_l a_l e^{2 pi i l t}, the conditions read
    sum_l a_l (2 pi i l)^m = delta_km, i.e. an integer Vandermonde system for
    r_l = a_l (2 pi i)^k.
    """
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    if n > MAX_ORDER:
        raise SynthesisError("order capped at %d" % MAX_ORDER)
    # V[m][l] = l^m, solve V r = e_k over the rationals
    rows = [[Fraction(l) ** m for l in range(n)] + [Fraction(int(m == k))]
            for m in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if rows[i][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        pivval = rows[col][col]
        rows[col] = [v / pivval for v in rows[col]]
        for i in range(n):
            if i != col and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[col])]
    r = [rows[l][n] for l in range(n)]
    scale = (2j * np.pi) ** (-k)
    coeffs = {(l,): complex(r[l]) * scale for l in range(n) if r[l] != 0}
    g = TrigPolynomial(coeffs, 1)
    resid = max(abs(g.derivative_at_zero((m,)) - (1.0 if m == k else 0.0))
                for m in range(n))
    # the solve is exact over rationals; the residual only sees the rounding
    # of (2 pi i)^m factors, which grows with the order
    if resid > 1e-9:
        raise SynthesisError("g_%d solve residual %.3g exceeds 1e-9" % (k, resid))
    return g


# ----------------------------------------------------------------------------
# moment tables

@dataclass
class MomentTable:
    order: int
    dim: int
    derivs: dict  # multi-index -> complex D^alpha(0)

    def __getitem__(self, alpha):
        return self.derivs[tuple(alpha)]


def _fd_weights(m):
    """Symmetric finite-difference weights for the m-th derivative (unit step)."""
    q = m // 2 + 1
    offsets = np.arange(-q, q + 1)
    V = np.vander(offsets, increasing=True).T.astype(float)
    rhs = np.zeros(2 * q + 1)
    rhs[m] = math.factorial(m)
    return offsets, np.linalg.solve(V, rhs)


def _fd_derivative(func, alpha, h):
    """Nested central differences for the mixed partial D^alpha at 0."""
    dim = len(alpha)
    grids = []
    for a in alpha:
        off, w = _fd_weights(a)
        grids.append((off, w / h ** a))
    mesh = np.meshgrid(*[g[0] for g in grids], indexing="ij")
    pts = np.stack([m.astype(float) * h for m in mesh], axis=-1).reshape(-1, dim)
    vals = np.asarray(func(pts), dtype=complex).reshape([len(g[0]) for g in grids])
    for axis in reversed(range(dim)):
        vals = np.tensordot(vals, grids[axis][1], axes=([axis], [0]))
    return complex(vals)


def _richardson_deriv(func, alpha, base_step=FD_BASE_STEP, tol=1e-6):
    d0 = _fd_derivative(func, alpha, base_step)
    d1 = _fd_derivative(func, alpha, base_step / 2)
    d2 = _fd_derivative(func, alpha, base_step / 4)
    r1 = (4 * d1 - d0) / 3
    r2 = (4 * d2 - d1) / 3
    if abs(r2 - r1) > tol * max(1.0, abs(r2)):
        raise SynthesisError(
            "finite-difference levels disagree by %.3g for alpha=%s"
            % (abs(r2 - r1), alpha))
    return (16 * r2 - r1) / 15


def moment_table(symbol, n, dim=None):
    """Derivatives D^alpha of a frequency symbol at 0 for all [alpha] < n.

    `symbol` is either a kernel/averager (closed-form Taylor data preferred,
    frequency evaluation as fallback) or a bare callable on (..., d) points.
    """
    if isinstance(symbol, SincSquared):
        raise SynthesisError("squared-sinc symbol is not smooth at the origin")
    taylor = getattr(symbol, "taylor_deriv", None)
    func = getattr(symbol, "fourier", symbol)
    if dim is None:
        dim = getattr(symbol, "dim", None)
        if dim is None:
            raise ValueError("dim required for bare callables")
    derivs = {}
    for alpha in multi_indices(dim, n):
        val = taylor(alpha) if taylor is not None else None
        if val is None:
            val = _richardson_deriv(func, alpha)
        derivs[alpha] = complex(val)
    return MomentTable(order=n, dim=dim, derivs=derivs)


# ----------------------------------------------------------------------------
# T and Q constructions

def solve_T(table, n):
    """Coefficients c_alpha with c_0 = 1 and
    sum_{alpha<=beta} binom(beta,alpha) conj(D^{beta-alpha} avg(0)) c_alpha = 0
    for 0 < [beta] < n.  The system is unitriangular in total degree.
    """
    if table.order < n:
        raise ValueError("moment table order %d < n=%d" % (table.order, n))
    if abs(table[(0,) * table.dim] - 1.0) > 1e-9:
        raise ValueError("averager symbol must equal 1 at the origin")
    c = {}
    for beta in multi_indices(table.dim, n):
        if sum(beta) == 0:
            c[beta] = 1.0 + 0.0j
            continue
        acc = 0.0 + 0.0j
        for alpha in _sub_multi_indices(beta):
            if alpha == beta:
                continue
            diff = tuple(b - a for b, a in zip(beta, alpha))
            acc += _binom_multi(beta, alpha) * np.conj(table[diff]) * c[alpha]
        c[beta] = -acc
    return c


def assemble_T(c, n):
    """T(xi) = sum_alpha c_alpha prod_j g_{alpha_j}(xi_j), expanded to
    exponential coefficients on {0..n-1}^d.
    """
    dim = len(next(iter(c)))
    gs = [make_g(k, n) for k in range(n)]
    coeffs = {}
    for alpha, ca in c.items():
        if abs(ca) == 0.0:
            continue
        # tensor product of the 1-D coefficient maps
        prod = {(): 1.0 + 0.0j}
        for a in alpha:
            nxt = {}
            for l, v in prod.items():
                for (l1,), w in gs[a].coeffs.items():
                    key = l + (l1,)
                    nxt[key] = nxt.get(key, 0.0) + v * w
            prod = nxt
        for l, v in prod.items():
            coeffs[l] = coeffs.get(l, 0.0) + ca * v
    coeffs = {l: v for l, v in coeffs.items() if abs(v) > 1e-15}
    return TrigPolynomial(coeffs, dim)


def synthesize_kernel(averager, n):
    """SincCombo kernel of approximation order n against the given averager."""
    table = moment_table(averager, n)
    c = solve_T(table, n)
    T = assemble_T(c, n)
    kernel = SincCombo(T)
    defect = moment_defect(kernel, averager, n)
    if defect >= DEFECT_TOL:
        raise SynthesisError("post-hoc moment defect %.3g >= %.0e"
                             % (defect, DEFECT_TOL))
    return kernel


def solve_Q(kernel_table, avg_table, n):
    """Shift coefficients b_l correcting the averager against a fixed kernel.

    First c' inverts the kernel symbol at the origin, then c matches the
    averager table to c'; Q is assembled exactly as T.
    """
    if abs(kernel_table[(0,) * kernel_table.dim]) < 1e-12:
        raise ValueError("kernel symbol vanishes at the origin")
    dim = kernel_table.dim
    cp = {}
    for beta in multi_indices(dim, n):
        if sum(beta) == 0:
            cp[beta] = 1.0 + 0.0j
            continue
        acc = 0.0 + 0.0j
        for alpha in _sub_multi_indices(beta):
            if alpha == beta:
                continue
            diff = tuple(b - a for b, a in zip(beta, alpha))
            acc += _binom_multi(beta, alpha) * np.conj(kernel_table[diff]) * cp[alpha]
        cp[beta] = (-acc) / np.conj(kernel_table[(0,) * dim])
    c = {}
    for beta in multi_indices(dim, n):
        if sum(beta) == 0:
            c[beta] = 1.0 + 0.0j
            continue
        acc = 0.0 + 0.0j
        for alpha in _sub_multi_indices(beta):
            if alpha == beta:
                continue
            diff = tuple(b - a for b, a in zip(beta, alpha))
            acc += _binom_multi(beta, alpha) * np.conj(avg_table[diff]) * c[alpha]
        c[beta] = cp[beta] - acc
    return assemble_T(c, n)


def shifted_combo_averager(kernel, averager, n):
    """ShiftedCombo averager whose pairing with `kernel` has order n,
    verified by the defect oracle."""
    from .kernels import ShiftedCombo
    Q = solve_Q(moment_table(kernel, n), moment_table(averager, n), n)
    combo = ShiftedCombo(averager, Q)
    defect = moment_defect(kernel, combo, n)
    if defect >= DEFECT_TOL:
        raise SynthesisError("post-hoc moment defect %.3g >= %.0e"
                             % (defect, DEFECT_TOL))
    return combo


# ----------------------------------------------------------------------------
# oracles

def moment_defect(kernel, averager, n):
    """max over [beta] < n of |D^beta(1 - phi_hat conj(avg_hat))(0)|."""
    kt = moment_table(kernel, n)
    at = moment_table(averager, n)
    worst = 0.0
    for beta in multi_indices(kt.dim, n):
        acc = 0.0 + 0.0j
        for alpha in _sub_multi_indices(beta):
            diff = tuple(b - a for b, a in zip(beta, alpha))
            acc += _binom_multi(beta, alpha) * kt[alpha] * np.conj(at[diff])
        target = 1.0 if sum(beta) == 0 else 0.0
        worst = max(worst, abs(target - acc))
    return worst


def check_strict_compatibility(kernel, averager, delta, grid_per_axis=64,
                               tol=1e-10):
    """conj(phi_hat) avg_hat = 1 on {|xi| < delta} and phi_hat = 0 near the
    3^d - 1 nearest nonzero lattice points, both checked on grids."""
    if not 0 < delta < 0.5:
        raise ValueError("need 0 < delta < 1/2")
    dim = kernel.dim
    axes = [np.linspace(-delta, delta, grid_per_axis) for _ in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(-1, dim)
    pts = pts[np.linalg.norm(pts, axis=-1) < delta]
    prod = np.conj(kernel.fourier(pts)) * np.asarray(averager.fourier(pts))
    if np.max(np.abs(prod - 1.0)) > tol:
        return False
    for l in itertools.product((-1, 0, 1), repeat=dim):
        if all(v == 0 for v in l):
            continue
        shifted = pts + np.asarray(l, dtype=float)
        if np.max(np.abs(kernel.fourier(shifted))) > tol:
            return False
    return True
