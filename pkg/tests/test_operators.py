import numpy as np
import pytest

from kksampler import (BoxIndicator, EvalGrid, QuadratureSpec, SincAverager,
                       TruncationPolicy, generalized_sampling, kantorovich_1d,
                       new_dilation, plain_sinc, quasi_projection,
                       fourier_side_projection)
from kksampler.corpus import get_function

QS = QuadratureSpec()
M1 = new_dilation([[2.0]])


def test_linearity():
    f = get_function("gaussian_1d")
    g = get_function("bump_bl")
    grid = EvalGrid(((-2.0, 2.0),), 65)
    trunc = TruncationPolicy(radius=32)
    kernel = plain_sinc(1)
    box = BoxIndicator([-0.5], [0.5])
    a, b = 1.7, -0.4

    def mix(x):
        return a * np.asarray(f(x)) + b * np.asarray(g(x))

    rm = quasi_projection(mix, kernel, box, M1, 2, grid, trunc, QS)
    rf = quasi_projection(f, kernel, box, M1, 2, grid, trunc, QS)
    rg = quasi_projection(g, kernel, box, M1, 2, grid, trunc, QS)
    assert np.max(np.abs(rm.values - (a * rf.values + b * rg.values))) < 1e-10


def test_shift_covariance():
    # shifting f by M^-j s permutes the coefficients: outputs shift on-grid
    f = get_function("gaussian_1d")
    grid = EvalGrid(((-2.0, 2.0),), 257)  # spacing 1/64
    trunc = TruncationPolicy(radius=48)
    kernel = plain_sinc(1)
    box = BoxIndicator([-0.5], [0.5])
    j, s = 2, 4  # shift M^-j s = 1 = 64 grid cells
    cells = 64

    def fs(x):
        return f(np.asarray(x) - 1.0)

    base = quasi_projection(f, kernel, box, M1, j, grid, trunc, QS).values
    shifted = quasi_projection(fs, kernel, box, M1, j, grid, trunc, QS).values
    assert np.max(np.abs(shifted[cells:] - base[:-cells])) < 1e-8


def test_kantorovich_equals_quasi_projection_under_index_flip():
    # K_w with w = 2^j is the dilation form with the [0,1] box averager:
    # the k -> -k re-indexing turns phi(wx - k) into phi(M^j x + k) while
    # mapping the cell [k/w, (k+1)/w] onto M^-j([0,1] - k)
    f = get_function("gaussian_1d")
    grid = EvalGrid(((-2.0, 2.0),), 129)
    trunc = TruncationPolicy(radius=32)
    kernel = plain_sinc(1)
    j = 3
    kw = kantorovich_1d(f, 2.0 ** j, kernel, grid, trunc, QS)
    qp = quasi_projection(f, kernel, BoxIndicator([0.0], [1.0]), M1, j,
                          grid, trunc, QS)
    assert np.max(np.abs(kw.values - qp.values)) < 1e-9


def test_kantorovich_partition_of_unity_on_constant():
    class One:
        antiderivative = staticmethod(lambda t: np.asarray(t, dtype=float))

        def __call__(self, x):
            return np.ones(np.asarray(x).shape[:-1])

    grid = EvalGrid(((-1.0, 1.0),), 41)
    kw = kantorovich_1d(One(), 4.0, plain_sinc(1), grid,
                        TruncationPolicy(radius=200), QS)
    assert np.max(np.abs(kw.values - 1.0)) < 1e-4


def test_generalized_sampling_reproduces_band_limited():
    f = get_function("bump_bl")  # band limit 1/4 < w/2 for w = 1
    grid = EvalGrid(((-3.0, 3.0),), 121)
    sw = generalized_sampling(f, 1.0, plain_sinc(1), grid,
                              TruncationPolicy(radius=64))
    ref = f(grid.points).reshape(grid.shape)
    assert np.max(np.abs(sw.values - ref)) < 1e-6


def test_jitter_sensitivity_documented():
    # point samples move O(1) near a jump; cell averages move O(jitter)
    f = get_function("chi01")
    grid = EvalGrid(((-1.0, 2.0),), 301)
    trunc = TruncationPolicy(radius=32)
    fej = plain_sinc(1)
    w, jit = 8.0, 1e-3
    sw = generalized_sampling(f, w, fej, grid, trunc)
    swj = generalized_sampling(f, w, fej, grid, trunc, jitter=jit / w)
    assert np.max(np.abs(swj.values - sw.values)) > 0.1

    class Shifted:
        antiderivative = staticmethod(
            lambda t: f.antiderivative(np.asarray(t) - jit / w))

        def __call__(self, x):
            return f(np.asarray(x) - jit / w)

    kw = kantorovich_1d(f, w, fej, grid, trunc, QS)
    kwj = kantorovich_1d(Shifted(), w, fej, grid, trunc, QS)
    assert np.max(np.abs(kwj.values - kw.values)) < 10 * jit


def test_zero_function_maps_to_zero():
    zero = lambda x: np.zeros(np.asarray(x).shape[:-1])
    zero_hat = lambda xi: np.zeros(np.asarray(xi).shape[:-1], dtype=complex)
    grid = EvalGrid(((-1.0, 1.0),), 33)
    trunc = TruncationPolicy(radius=16)
    qp = quasi_projection(zero, plain_sinc(1), BoxIndicator([-0.5], [0.5]),
                          M1, 1, grid, trunc, QS)
    assert np.max(np.abs(qp.values)) == 0.0

    class ZeroHat:
        fourier = staticmethod(zero_hat)

        def __call__(self, x):
            return zero(x)

    fp = fourier_side_projection(ZeroHat(), M1, 1, grid, trunc, QS)
    assert np.max(np.abs(fp.values)) == 0.0


def test_tail_tol_mode_drops_negligible_terms():
    f = get_function("gaussian_1d")
    grid = EvalGrid(((-1.0, 1.0),), 65)
    kernel = plain_sinc(1)
    box = BoxIndicator([-0.5], [0.5])
    full = quasi_projection(f, kernel, box, M1, 2, grid,
                            TruncationPolicy(radius=40), QS)
    trimmed = quasi_projection(f, kernel, box, M1, 2, grid,
                               TruncationPolicy(mode="tail_tol", radius=40,
                                                tail_tol=1e-9), QS)
    assert trimmed.meta["n_terms"] < full.meta["n_terms"]
    assert np.max(np.abs(trimmed.values - full.values)) < 1e-8


def test_boundedness_surrogate_no_blowup_in_j():
    # sup_j ||Q_j f||_2(window) stays bounded by a single constant
    f = get_function("gaussian_1d")
    grid = EvalGrid(((-2.0, 2.0),), 129)
    trunc = TruncationPolicy(radius=32)
    kernel = plain_sinc(1)
    box = BoxIndicator([-0.5], [0.5])
    cell = grid.spacing[0]
    norm_f = np.sqrt(cell * np.sum(f(grid.points) ** 2))
    for j in range(1, 8):
        vals = quasi_projection(f, kernel, box, M1, j, grid, trunc, QS).values
        norm_q = np.sqrt(cell * np.sum(vals ** 2))
        assert norm_q <= 2.0 * norm_f


def test_input_validation():
    grid = EvalGrid(((-1.0, 1.0),), 17)
    with pytest.raises(ValueError):
        EvalGrid(((1.0, -1.0),), 17)
    with pytest.raises(ValueError):
        TruncationPolicy(mode="bogus")
    with pytest.raises(ValueError):
        kantorovich_1d(get_function("gaussian_1d"), -1.0, plain_sinc(1),
                       grid, TruncationPolicy())
    with pytest.raises(ValueError):
        quasi_projection(get_function("gaussian_1d"), plain_sinc(1),
                         BoxIndicator([-0.5], [0.5]), M1, -1, grid,
                         TruncationPolicy(), QS)
