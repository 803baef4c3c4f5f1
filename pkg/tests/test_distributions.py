from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyboltz.distributions import (DistributionError, Field, InvariantIndex, MaxwellianParams, STANDARD,
                                     inner_product, invariant_field, maxwellian_arrays, maxwellian_field, moments,
                                     sqrt_maxwellian)
from polyboltz.kinematics import GasModel
from polyboltz.quadrature import QuadratureSpec

GAS = GasModel()
QUAD = QuadratureSpec(n_interval=12, n_semi=8)


def test_moments_recover_parameters():
    p = MaxwellianParams(2.0, (1.0, 0.0, 0.0), 1.5)
    got = moments(maxwellian_field(p, GAS), GAS, QUAD)
    assert got.n == pytest.approx(2.0, rel=1e-5)
    np.testing.assert_allclose(got.u, (1.0, 0.0, 0.0), atol=1e-5)
    assert got.T == pytest.approx(1.5, rel=1e-5)
    got = moments(maxwellian_field(STANDARD, GAS), GAS, QUAD)
    assert got.n == pytest.approx(1.0, rel=1e-5) and got.T == pytest.approx(1.0, rel=1e-5)
    np.testing.assert_allclose(got.u, 0.0, atol=1e-5)


def test_moments_of_two_beams():
    a = MaxwellianParams(0.5, (1.0, 0.0, 0.0), 1.0)
    b = MaxwellianParams(0.5, (-1.0, 0.0, 0.0), 1.0)
    f = Field(lambda v, I: maxwellian_arrays(a, GAS, v, I) + maxwellian_arrays(b, GAS, v, I))
    got = moments(f, GAS, QUAD)
    assert got.n == pytest.approx(1.0, rel=1e-5)
    np.testing.assert_allclose(got.u, 0.0, atol=1e-5)


def test_moments_rejects_zero_density():
    with pytest.raises(DistributionError):
        moments(Field(lambda v, I: 0.0 * I), GAS, QUAD)


def test_odd_integrand_vanishes():
    f = Field(lambda v, I: v[..., 0] * maxwellian_arrays(STANDARD, GAS, v, I))
    one = Field(lambda v, I: np.ones_like(I))
    assert abs(inner_product(f, one, QUAD)) <= 1e-10


def test_density_normalization_other_delta():
    gas = GasModel(2.0, 5.0)
    f = maxwellian_field(MaxwellianParams(1.7, (0, 0.5, 0), 0.8), gas)
    assert moments(f, gas, QUAD).n == pytest.approx(1.7, rel=1e-5)


def test_invariants():
    v = np.array([[1.0, 2.0, 3.0]])
    I = np.array([0.5])
    assert invariant_field(InvariantIndex.mass, GAS)(v, I)[0] == 1.0
    assert invariant_field(InvariantIndex.py, GAS)(v, I)[0] == 2.0
    assert invariant_field(InvariantIndex.energy, GAS)(v, I)[0] == pytest.approx(15.0)
    assert sqrt_maxwellian(GAS, v, I)[0] ** 2 == pytest.approx(maxwellian_arrays(STANDARD, GAS, v, I)[0], rel=1e-14)


def test_params_validation():
    with pytest.raises(DistributionError):
        MaxwellianParams(0.0)
    with pytest.raises(DistributionError):
        MaxwellianParams(1.0, (0, 0, 0), -1.0)


def _poly_field(c):
    return Field(lambda v, I: (c[0] + c[1] * v[..., 0] + c[2] * I) * maxwellian_arrays(STANDARD, GAS, v, I))


coef = st.tuples(*[st.floats(-2, 2)] * 3)
SMALL = QuadratureSpec(n_interval=6, n_semi=4)


@settings(max_examples=10, deadline=None)
@given(coef, coef, coef, st.floats(-2, 2))
def test_inner_product_symmetric_bilinear(a, b, c, t):
    f, g, h = _poly_field(a), _poly_field(b), _poly_field(c)
    fg = inner_product(f, g, SMALL)
    assert fg == pytest.approx(inner_product(g, f, SMALL), rel=1e-12, abs=1e-14)
    comb = Field(lambda v, I: f(v, I) + t * g(v, I))
    lhs = inner_product(comb, h, SMALL)
    rhs = inner_product(f, h, SMALL) + t * inner_product(g, h, SMALL)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(0.2, 3.0), st.floats(0.01, 20.0))
def test_maxwellian_positive_and_rotation_invariant(seed, T, I):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=3)
    p = MaxwellianParams(1.3, tuple(u), T)
    c = rng.normal(size=3)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    a = maxwellian_arrays(p, GAS, u + c, I)
    b = maxwellian_arrays(p, GAS, u + Q @ c, I)
    assert a > 0
    assert a == pytest.approx(b, rel=1e-13)
