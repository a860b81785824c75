"""Error measurement: windowed L_p distances, moduli of smoothness, and
empirical convergence orders.

The modulus estimator samples the sup over steps |delta| < h on a finite set
of radii and directions; it is a lower bound of the true sup that converges
under refinement, and the property checks therefore run on shared delta
sets where the defining inequalities are exact.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["lp_distance", "grid_lp_norm", "delta_set",
           "modulus_of_smoothness", "modulus_with_deltas", "fit_order",
           "modulus_properties_check", "ConvergenceReport"]


def grid_lp_norm(values, spacing, p):
    """Riemann-sum L_p norm of grid values (max norm for p = inf)."""
    values = np.asarray(values)
    if np.isinf(p):
        return float(np.max(np.abs(values)))
    cell = float(np.prod(spacing))
    return float((cell * np.sum(np.abs(values) ** p)) ** (1.0 / p))


def lp_distance(g1, g2, spacing, p):
    g1, g2 = np.asarray(g1), np.asarray(g2)
    if g1.shape != g2.shape:
        raise ValueError("grid geometry mismatch: %s vs %s"
                         % (g1.shape, g2.shape))
    return grid_lp_norm(g1 - g2, spacing, p)


def _window_grid(window, points_per_axis):
    axes = [np.linspace(lo, hi, points_per_axis) for lo, hi in window]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    spacing = np.array([(hi - lo) / (points_per_axis - 1) for lo, hi in window])
    return pts, spacing


def delta_set(dim, h, n_radii=16, n_dirs=8):
    """Sampled steps with |delta| < h: radii times unit directions."""
    radii = h * np.arange(1, n_radii + 1) / n_radii * (1.0 - 1e-12)
    if dim == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        ang = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        if dim != 2:
            raise NotImplementedError("delta sampling implemented for d <= 2")
    return np.array([r * d for r in radii for d in dirs])


def modulus_with_deltas(f, n, deltas, p, window, points_per_axis=513):
    """max over the given deltas of the grid L_p norm of the n-th difference."""
    pts, spacing = _window_grid(window, points_per_axis)
    signs = np.array([(-1) ** nu * math.comb(n, nu) for nu in range(n + 1)])
    best = 0.0
    for delta in np.atleast_2d(deltas):
        acc = np.zeros(pts.shape[:-1])
        for nu in range(n + 1):
            acc += signs[nu] * np.asarray(f(pts + nu * delta))
        best = max(best, grid_lp_norm(acc, spacing, p))
    return best


def modulus_of_smoothness(f, n, h, p, window, n_radii=16, n_dirs=8,
                          points_per_axis=513):
    """Sampled estimator of omega_n(f, h)_p on the window."""
    if h <= 0:
        raise ValueError("h must be positive")
    deltas = delta_set(len(window), h, n_radii, n_dirs)
    return modulus_with_deltas(f, n, deltas, p, window, points_per_axis)


def fit_order(rows, floor=0.0):
    """Least-squares slope of log2(error) against log2(scale).

    Rows with error at or below the run's error floor are excluded so
    quadrature noise does not flatten the fit.
    """
    usable = [(s, e) for s, e in rows if e > floor]
    if len(usable) < 3:
        raise ValueError("need at least 3 usable rows, have %d" % len(usable))
    s = np.log2([r[0] for r in usable])
    e = np.log2([r[1] for r in usable])
    return float(np.polyfit(s, e, 1)[0])


def modulus_properties_check(f, g, n, h, lam, p, window, points_per_axis=513,
                             tol=1e-9):
    """Finite-sample verification of the standard modulus inequalities:
    (i) subadditivity, (ii) the 2^n norm bound, (iii) the (1+lambda)^n
    scaling bound.  (i) and (iii) use shared delta sets so they are exact
    inequalities of the estimator."""
    dim = len(window)
    deltas = delta_set(dim, h)
    pts, spacing = _window_grid(window, points_per_axis)

    def fg(x):
        return np.asarray(f(x)) + np.asarray(g(x))

    w_f = modulus_with_deltas(f, n, deltas, p, window, points_per_axis)
    w_g = modulus_with_deltas(g, n, deltas, p, window, points_per_axis)
    w_fg = modulus_with_deltas(fg, n, deltas, p, window, points_per_axis)
    subadditive = w_fg <= w_f + w_g + tol

    norm_f = grid_lp_norm(np.asarray(f(pts)), spacing, p)
    norm_bound = w_f <= 2 ** n * norm_f + tol

    # (iii): every step sampled at scale lambda*h, against the same steps
    # rescaled into |delta| < h via the (1+lambda)^n bound
    w_lam = modulus_with_deltas(f, n, lam * deltas, p, window, points_per_axis)
    w_base = modulus_with_deltas(f, n, deltas, p, window, points_per_axis)
    scaling = w_lam <= (1 + lam) ** n * w_base + tol

    return {
        "subadditive": bool(subadditive),
        "norm_bound": bool(norm_bound),
        "scaling": bool(scaling),
        "omega_f": w_f, "omega_g": w_g, "omega_sum": w_fg,
        "omega_lambda": w_lam, "norm_f": norm_f,
    }


@dataclass
class ConvergenceReport:
    """Per-level errors against the modulus-of-smoothness bound."""
    rows: list = field(default_factory=list)
    # each row: dict with j, scale, error, ratio, modulus
    fitted_order: float = float("nan")
    constant_C: float = float("nan")
    error_floor: float = 0.0

    COLUMNS = ("j", "scale", "lp_error", "ratio_to_previous", "modulus_bound")

    def add(self, j, scale, error, modulus):
        ratio = (self.rows[-1]["lp_error"] / error
                 if self.rows and error > 0 else float("nan"))
        self.rows.append({"j": j, "scale": scale, "lp_error": error,
                          "ratio_to_previous": ratio, "modulus_bound": modulus})

    def finalize(self):
        pairs = [(r["scale"], r["lp_error"]) for r in self.rows]
        self.fitted_order = fit_order(pairs, floor=self.error_floor)
        ratios = [r["lp_error"] / r["modulus_bound"] for r in self.rows
                  if r["modulus_bound"] > 0]
        self.constant_C = max(ratios) if ratios else float("nan")
        return self

    def to_csv(self, header_lines=()):
        lines = ["# " + h for h in header_lines]
        lines.append(",".join(self.COLUMNS))
        for r in self.rows:
            lines.append(",".join(repr(r[c]) if isinstance(r[c], float)
                                  else str(r[c]) for c in self.COLUMNS))
        return "\n".join(lines) + "\n"
