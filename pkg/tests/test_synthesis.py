import numpy as np
import pytest

from kksampler import (BallIndicator, BochnerRiesz, BoxIndicator,
                       SincAverager, check_strict_compatibility, make_g,
                       moment_defect, moment_table, plain_sinc,
                       shifted_combo_averager, solve_T, synthesize_kernel)
from kksampler.synthesis import assemble_T, multi_indices


def test_make_g_interpolates_derivatives():
    for n in range(1, 7):
        for k in range(n):
            g = make_g(k, n)
            for m in range(n):
                d = g.derivative_at_zero((m,))
                expect = 1.0 if m == k else 0.0
                assert abs(d - expect) < 1e-9, (n, k, m)


def test_make_g_second_order_closed_form():
    g2 = make_g(2, 4)
    scale = -1.0 / (8.0 * np.pi ** 2)
    expect = {(0,): 2.0, (1,): -5.0, (2,): 4.0, (3,): -1.0}
    for l, v in expect.items():
        assert g2.coeffs[l] == pytest.approx(scale * v, abs=1e-14)


def test_assemble_T_round_trip_random():
    rng = np.random.default_rng(4)
    for dim in (1, 2):
        n = 4
        c = {alpha: complex(rng.normal(), rng.normal())
             for alpha in multi_indices(dim, n)}
        c[(0,) * dim] = 1.0 + 0.0j
        T = assemble_T(c, n)
        for alpha in multi_indices(dim, n):
            assert abs(T.derivative_at_zero(alpha) - c[alpha]) < 1e-9


def test_synthesize_box_1d_order4_coefficients():
    kernel = synthesize_kernel(BoxIndicator([-0.5], [0.5]), 4)
    expect = {(0,): 11.0 / 12.0, (1,): 5.0 / 24.0,
              (2,): -1.0 / 6.0, (3,): 1.0 / 24.0}
    assert set(kernel.T.coeffs) == set(expect)
    for l, v in expect.items():
        assert abs(kernel.T.coeffs[l] - v) < 1e-12


def test_synthesize_box_2d_constant_term():
    kernel = synthesize_kernel(BoxIndicator([-0.5, -0.5], [0.5, 0.5]), 4)
    assert abs(kernel.T.coeffs[(0, 0)] - 5.0 / 6.0) < 1e-12


def test_first_moment_obstruction_for_asymmetric_box():
    sinc = plain_sinc(1)
    box = BoxIndicator([0.0], [1.0])
    assert moment_defect(sinc, box, 1) < 1e-12
    assert moment_defect(sinc, box, 2) > 0.1  # first moment is pi-sized


def test_symmetric_box_gains_an_order():
    sinc = plain_sinc(1)
    box = BoxIndicator([-0.5], [0.5])
    assert moment_defect(sinc, box, 2) < 1e-12
    assert moment_defect(sinc, box, 3) > 1e-2


def test_synthesized_defect_vanishes_to_requested_order():
    for avg in (BoxIndicator([-0.5], [0.5]), BallIndicator(0.5, 2)):
        kernel = synthesize_kernel(avg, 4)
        assert moment_defect(kernel, avg, 4) < 1e-10
        assert moment_defect(kernel, avg, 5) > 1e-4


def test_shifted_combo_corrects_bochner_riesz():
    for delta in (0.5, 1.0):
        br = BochnerRiesz(delta, 2)
        box = BoxIndicator([-0.5, -0.5], [0.5, 0.5])
        combo = shifted_combo_averager(br, box, 4)
        assert moment_defect(br, combo, 4) < 1e-8
        # uncorrected pair: second-moment obstruction (first moments vanish
        # by symmetry, so the defect shows up at order 3)
        assert moment_defect(br, box, 3) > 1e-3


def test_moment_table_matches_closed_form_box():
    # symmetric box symbol sinc(xi): D^2 at 0 is -pi^2/3
    table = moment_table(BoxIndicator([-0.5], [0.5]), 4)
    assert table[(0,)] == pytest.approx(1.0)
    assert abs(table[(1,)]) < 1e-12
    assert table[(2,)].real == pytest.approx(-np.pi ** 2 / 3.0, rel=1e-10)


def test_moment_table_ball():
    # disc symbol: D^(2,0) at 0 equals -pi^2 for unit radius
    table = moment_table(BallIndicator(1.0, 2), 4)
    assert table[(2, 0)].real == pytest.approx(-np.pi ** 2, rel=1e-10)
    assert abs(table[(1, 1)]) < 1e-12


def test_strict_compatibility_sinc_pair():
    sinc = plain_sinc(1)
    assert check_strict_compatibility(sinc, SincAverager(1), 0.3)
    assert not check_strict_compatibility(sinc, BoxIndicator([-0.5], [0.5]),
                                          0.3)


def test_solve_T_unit_for_sinc_averager():
    c = solve_T(moment_table(SincAverager(1), 4), 4)
    assert abs(c[(0,)] - 1.0) < 1e-12
    for alpha in multi_indices(1, 4):
        if sum(alpha) > 0:
            assert abs(c[alpha]) < 1e-12
