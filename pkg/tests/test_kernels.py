import numpy as np
import pytest

from kksampler import (BallIndicator, BochnerRiesz, BoxIndicator,
                       ShiftedCombo, SincAverager, SincCombo, SincSquared,
                       TrigPolynomial, eval_sinc, plain_sinc)
from kksampler.kernels import (averager_from_json, averager_to_json,
                               kernel_from_json, kernel_to_json)


def example1_kernel():
    T = TrigPolynomial({(0,): 11.0 / 12.0, (1,): 5.0 / 24.0,
                        (2,): -1.0 / 6.0, (3,): 1.0 / 24.0}, 1)
    return SincCombo(T)


def test_sinc_cardinality():
    ks = np.arange(-5, 6, dtype=float)[:, None]
    vals = eval_sinc(ks)
    expect = (ks[:, 0] == 0).astype(float)
    assert np.allclose(vals, expect, atol=1e-15)


def test_sinc_partition_of_unity():
    rng = np.random.default_rng(1)
    ks = np.arange(-4000, 4001, dtype=float)
    for x in rng.uniform(-1, 1, size=5):
        total = np.sum(np.sinc(x - ks))
        assert abs(total - 1.0) < 1e-4


def test_fejer_partition_of_unity():
    fej = SincSquared(1)
    ks = np.arange(-3000, 3001, dtype=float)
    for x in (0.3, -0.7, 1.9):
        total = np.sum(fej((x - ks)[:, None]))
        assert abs(total - 1.0) < 1e-3


def test_trig_polynomial_periodicity():
    T = TrigPolynomial({(0,): 0.5, (2,): 0.25 + 0.1j, (-1,): -0.3}, 1)
    xi = np.linspace(-0.5, 0.5, 11)[:, None]
    assert np.allclose(T(xi), T(xi + 1.0), atol=1e-12)


def test_trig_polynomial_derivative_matches_fd():
    T = TrigPolynomial({(0,): 1.0, (1,): 0.5, (3,): -0.25}, 1)
    h = 1e-5
    xs = np.array([[-2 * h], [-h], [h], [2 * h]])
    fd = (T(xs[0]) - 8 * T(xs[1]) + 8 * T(xs[2]) - T(xs[3])) / (12 * h)
    assert abs(T.derivative_at_zero((1,)) - complex(fd)) < 1e-7


def test_sinc_combo_matches_inverse_transform_of_symbol():
    """phi(x) must equal the inverse transform of T restricted to the box."""
    k = example1_kernel()
    q, w = np.polynomial.legendre.leggauss(120)
    xi = 0.5 * q
    wq = 0.5 * w
    rng = np.random.default_rng(2)
    for x in rng.uniform(-3, 3, size=20):
        val = np.real(np.dot(k.T(xi[:, None]) * np.exp(2j * np.pi * xi * x),
                             wq))
        assert abs(val - float(k(np.array([[x]]))[0])) < 1e-8


def test_sinc_combo_fourier_vanishes_outside_box():
    k = example1_kernel()
    xi = np.array([[0.6], [-0.8], [1.4]])
    assert np.allclose(k.fourier(xi), 0.0)


def test_fejer_symbol():
    fej = SincSquared(1)
    xi = np.linspace(-0.6, 0.6, 13)[:, None]
    expect = np.maximum(1.0 - 2.0 * np.abs(xi[:, 0]), 0.0)
    assert np.allclose(fej.fourier(xi), expect, atol=1e-12)


def test_bochner_riesz_radial_and_continuous_at_zero():
    br = BochnerRiesz(1.0, 2)
    rng = np.random.default_rng(3)
    for r in (0.5, 1.3, 2.7):
        ang = rng.uniform(0, 2 * np.pi, size=6)
        pts = r * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        vals = br(pts)
        assert np.max(np.abs(vals - vals[0])) < 1e-14
    tiny = br(np.array([[1e-8, 0.0]]))
    at0 = br(np.array([[0.0, 0.0]]))
    assert abs(float(tiny[0]) - float(at0[0])) < 1e-7


def test_bochner_riesz_symbol_support():
    br = BochnerRiesz(0.5, 2)
    inside = br.fourier(np.array([[0.3, 0.2]]))
    outside = br.fourier(np.array([[0.9, 0.9]]))
    assert float(np.real(inside)[0]) > 0.0
    assert float(np.abs(outside)[0]) == 0.0


def test_box_indicator_mean_normalization():
    box = BoxIndicator([0.0], [2.0])
    assert box.measure == pytest.approx(2.0)
    assert float(np.real(box.fourier(np.zeros((1, 1))))[0]) == pytest.approx(1.0)


def test_ball_indicator_symbol_at_zero():
    ball = BallIndicator(1.0, 2)
    assert float(np.real(ball.fourier(np.zeros((1, 2))))[0]) == pytest.approx(1.0)


def test_shifted_combo_evaluates_as_sum():
    box = BoxIndicator([-0.5], [0.5])
    Q = TrigPolynomial({(0,): 1.0, (1,): 0.25}, 1)
    combo = ShiftedCombo(box, Q)
    x = np.array([[0.1], [0.7], [1.2]])
    expect = (1.0 * box(x) + 0.25 * box(x + 1.0)) / 1.0
    assert np.allclose(combo(x), expect, atol=1e-14)


@pytest.mark.parametrize("kernel", [
    plain_sinc(1), plain_sinc(2), example1_kernel(),
    SincSquared(1), BochnerRiesz(0.5, 2), BochnerRiesz(1.0, 2)])
def test_kernel_json_round_trip(kernel):
    s = kernel_to_json(kernel)
    k2 = kernel_from_json(s)
    assert kernel_to_json(k2) == s
    x = np.full((1, kernel.dim), 0.37)
    assert np.allclose(kernel(x), k2(x), atol=0.0)


@pytest.mark.parametrize("avg", [
    BoxIndicator([0.0], [1.0]), BoxIndicator([-0.5, -0.5], [0.5, 0.5]),
    BallIndicator(1.0, 2), SincAverager(1),
    ShiftedCombo(BoxIndicator([-0.5], [0.5]),
                 TrigPolynomial({(0,): 1.0, (2,): -0.125 + 0.5j}, 1))])
def test_averager_json_round_trip(avg):
    s = averager_to_json(avg)
    a2 = averager_from_json(s)
    assert averager_to_json(a2) == s
