import numpy as np
import pytest

from kksampler import new_dilation
from kksampler.dilation import NonExpansiveError


def test_rejects_non_expansive():
    with pytest.raises(NonExpansiveError):
        new_dilation([[1.0]])
    with pytest.raises(NonExpansiveError):
        new_dilation([[1.5, 0.0], [0.0, 0.5]])
    with pytest.raises(NonExpansiveError):
        new_dilation(np.eye(2))


def test_rejects_bad_shapes():
    with pytest.raises(ValueError):
        new_dilation([[2.0, 0.0]])
    with pytest.raises(ValueError):
        new_dilation([[np.inf]])


def test_scalar_dyadic():
    M = new_dilation([[2.0]])
    assert M.dim == 1
    assert M.det_abs == 2.0
    assert M.theta == 2.0
    assert M.inv_power_norm(3) == pytest.approx(0.125)


def test_power_inverse_consistency():
    M = new_dilation([[1.0, -1.0], [1.0, 1.0]])
    for j in range(5):
        prod = M.power(j) @ M.power(-j)
        assert np.allclose(prod, np.eye(2), atol=1e-12)


def test_quincunx_scale_geometry():
    M = new_dilation([[1.0, -1.0], [1.0, 1.0]])
    assert M.det_abs == pytest.approx(2.0)
    for j in range(1, 8):
        assert M.inv_power_norm(j) == pytest.approx(2.0 ** (-j / 2.0))


def test_apply_power_matches_matmul():
    M = new_dilation([[2.0, 1.0], [0.0, 3.0]])
    rng = np.random.default_rng(0)
    x = rng.normal(size=(7, 2))
    assert np.allclose(M.apply_power(2, x), x @ M.power(2).T)


def test_power_cache_is_stable():
    M = new_dilation([[2.0]])
    a = M.power(5)
    b = M.power(5)
    assert a is b
    assert float(a[0, 0]) == 32.0
