"""Expansive dilation matrices and their scale geometry.

A dilation matrix M (all eigenvalues strictly outside the unit circle)
drives the refinement lattice: level j works on cells of size ~ ||M^-j||.
"""

import numpy as np

__all__ = ["DilationMatrix", "new_dilation", "NonExpansiveError"]

EXPANSIVE_TOL = 1e-9
DEFAULT_JMAX = 16


class NonExpansiveError(ValueError):
    """Raised when a matrix has an eigenvalue of modulus <= 1 + tol."""


class DilationMatrix:
    """A validated expansive d x d matrix with cached integer powers.

    Immutable after construction; the power cache is filled lazily but
    recomputation is pure, so sharing across threads is safe.
    """

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("dilation matrix must be square, got shape %s"
                             % (entries.shape,))
        if not np.all(np.isfinite(entries)):
            raise ValueError("dilation matrix entries must be finite")
        eigvals = np.linalg.eigvals(entries)
        moduli = np.abs(eigvals)
        if np.any(moduli <= 1.0 + EXPANSIVE_TOL):
            raise NonExpansiveError(
                "matrix is not expansive: eigenvalue moduli %s" % moduli)
        self._m = entries
        self.dim = entries.shape[0]
        self.det_abs = abs(np.linalg.det(entries))
        # largest theta with theta < |lambda| for every eigenvalue
        self.theta = float(moduli.min())
        self._powers = {0: np.eye(self.dim)}
        self._inv = np.linalg.inv(entries)

    @property
    def entries(self):
        return self._m.copy()

    def power(self, j):
        """M^j as an ndarray (negative j uses the inverse)."""
        j = int(j)
        if j not in self._powers:
            base = self._m if j > 0 else self._inv
            acc = np.eye(self.dim)
            for _ in range(abs(j)):
                acc = acc @ base
            self._powers[j] = acc
        return self._powers[j]

    def inv_power_norm(self, j):
        """Spectral norm ||M^-j||, j >= 0."""
        if j < 0:
            raise ValueError("j must be non-negative")
        if j == 0:
            return 1.0
        return float(np.linalg.norm(self.power(-j), 2))

    def apply_power(self, j, x):
        """M^j x for vectors or (..., d) arrays of vectors."""
        x = np.asarray(x, dtype=float)
        return x @ self.power(j).T

    def __repr__(self):
        return "DilationMatrix(%r)" % (self._m.tolist(),)


def new_dilation(entries):
    """Validate and wrap a d x d matrix as a DilationMatrix."""
    return DilationMatrix(entries)
