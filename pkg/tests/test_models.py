from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyboltz.kinematics import BLParams, CollisionPair, GasModel, PhasePoint, post_collision
from polyboltz.models import (CollisionGeometry, ModelError, ScatteringModel, envelope_check_est1a, kernel_B,
                              kernel_from_sigma, random_geometries, sigma, sigma_power_law_closed)

GAS = GasModel()
PRE = CollisionPair(PhasePoint((1, 0, 0), 0.5), PhasePoint((-1, 0, 0), 0.5))


def geometry(r=0.5, R=0.5, omega=(1, 0, 0), pre=PRE, gas=GAS):
    return CollisionGeometry.from_pairs(pre, post_collision(pre, BLParams(omega, r, R), gas), gas)


def swap(p: CollisionPair) -> CollisionPair:
    return CollisionPair(p.b, p.a)


VARIANTS = [ScatteringModel("PowerLawE", 1.0, 1.0), ScatteringModel("PowerLawE", 2.0, 0.3),
            ScatteringModel("GP20Model1", 1.0, 1.0), ScatteringModel("GP20Model2", 1.5, 0.7),
            ScatteringModel("GP20Model3", 1.0, 1.2), ScatteringModel("GP20Model2", 1.0, 1.0, angular_table=(1, 2, 3))]


def test_kernel_examples():
    g = geometry()
    assert g.E == 2.0
    assert kernel_B(ScatteringModel("PowerLawE", 1.0, 1.0), g, GAS) == pytest.approx(math.sqrt(2), rel=1e-14)
    assert kernel_B(ScatteringModel("GP20Model1", 1.0, 2.0), g, GAS) == pytest.approx(2.0, rel=1e-14)
    for E_geom in (g, geometry(0.2, 0.7, (0, 0.6, 0.8))):
        assert kernel_B(ScatteringModel("PowerLawE", 1.0, 2.0), E_geom, GAS) == pytest.approx(1.0, rel=1e-14)


def test_sigma_examples():
    g = geometry()
    assert sigma(ScatteringModel("PowerLawE", 1.0, 1.0), g, GAS) == pytest.approx(0.125, rel=1e-13)
    assert sigma(ScatteringModel("PowerLawE", 1.0, 2.0), g, GAS) == pytest.approx(math.sqrt(0.5) / 8, rel=1e-13)
    # R -> 0 with delta = 2: sigma ~ sqrt(R)
    model = ScatteringModel("PowerLawE", 1.0, 1.0)
    s1 = sigma(model, geometry(0.5, 1e-6), GAS)
    s2 = sigma(model, geometry(0.5, 4e-6), GAS)
    assert s2 / s1 == pytest.approx(2.0, rel=1e-5)


def test_sigma_rejects_singular_inputs():
    model = ScatteringModel()
    with pytest.raises(ModelError):
        sigma(model, geometry(0.0, 0.5), GAS)
    same = CollisionPair(PhasePoint((0, 0, 0), 1.0), PhasePoint((0, 0, 0), 1.0))
    with pytest.raises(ModelError):
        sigma(model, geometry(0.5, 0.5, pre=same), GAS)


def test_model_validation():
    with pytest.raises(ModelError):
        ScatteringModel("Hard", 1.0, 1.0)
    with pytest.raises(ModelError):
        ScatteringModel("PowerLawE", -1.0, 1.0)
    with pytest.raises(ModelError):
        ScatteringModel("PowerLawE", 1.0, 2.5)
    with pytest.raises(ModelError):
        ScatteringModel("GP20Model1", 1.0, 0.0)
    with pytest.raises(ModelError):
        ScatteringModel("PowerLawE", angular_table=(1.0, 2.0))
    assert ScatteringModel("PowerLawE", 1.0, 2.0).edge_case
    assert not ScatteringModel("PowerLawE", 1.0, 1.0).edge_case


def test_envelope_examples():
    rng = np.random.default_rng(3)
    geoms = random_geometries(2000, GAS, rng)
    rep = envelope_check_est1a(ScatteringModel("GP20Model1", 1.0, 2.0), GAS, geoms, 0.5)
    assert rep.holds and rep.worst_ratio <= 1.0
    high = random_geometries(2000, GAS, rng, e_range=(1.0, 100.0))
    rep = envelope_check_est1a(ScatteringModel("PowerLawE", 1.0, 1.0), GAS, high, 0.5)
    assert rep.holds and rep.worst_ratio <= 1.0
    with pytest.raises(ModelError):
        envelope_check_est1a(ScatteringModel(), GAS, geoms, 1.5)
    with pytest.raises(ModelError):
        envelope_check_est1a(ScatteringModel(), GAS, [], 0.5)


# worst B / envelope ratio over random_geometries(10_000, seed 0)
ENVELOPE_GOLDEN = 1.0276290454446113


def test_envelope_golden():
    # brute-force scan over 10^4 random geometries is its own oracle
    geoms = random_geometries(10_000, GAS, np.random.default_rng(0))
    rep = envelope_check_est1a(ScatteringModel("PowerLawE", 1.0, 1.0), GAS, geoms, 0.5)
    assert rep.holds and rep.n_used == 10_000
    assert rep.worst_ratio == pytest.approx(ENVELOPE_GOLDEN, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(VARIANTS), st.floats(0.3, 3.0), st.floats(2.0, 5.0))
def test_microreversibility_and_joint_swap(seed, model, m, delta):
    gas = GasModel(m, delta)
    for geom in random_geometries(20, gas, np.random.default_rng(seed)):
        b = kernel_B(model, geom, gas)
        assert b >= 0
        assert kernel_B(model, geom.reversed(gas), gas) == pytest.approx(b, rel=1e-12)
        joint = CollisionGeometry.from_pairs(swap(geom.pre), swap(geom.post), gas)
        assert kernel_B(model, joint, gas) == pytest.approx(b, rel=1e-12)
        assert kernel_from_sigma(sigma(model, geom, gas), geom, gas) == pytest.approx(b, rel=1e-12)
        assert sigma(model, geom, gas) >= 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([m for m in VARIANTS if m.variant != "GP20Model3"]))
def test_primed_swap_symmetry(seed, model):
    for geom in random_geometries(20, GAS, np.random.default_rng(seed)):
        ps = CollisionGeometry.from_pairs(geom.pre, swap(geom.post), GAS)
        assert kernel_B(model, ps, GAS) == pytest.approx(kernel_B(model, geom, GAS), rel=1e-12)


def test_model3_is_not_primed_swap_symmetric():
    # the third family weights I' by r and I*' by 1-r separately, so swapping
    # only the outgoing pair changes B; it is still symmetric under the joint swap
    model = ScatteringModel("GP20Model3", 1.0, 1.0)
    geom = geometry(0.2, 0.4, (0, 0, 1), CollisionPair(PhasePoint((1, 0, 0), 0.2), PhasePoint((-1, 0, 0), 2.0)))
    ps = CollisionGeometry.from_pairs(geom.pre, swap(geom.post), GAS)
    assert abs(kernel_B(model, ps, GAS) / kernel_B(model, geom, GAS) - 1.0) > 1e-3


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 2.0), st.floats(0.3, 3.0), st.floats(2.0, 5.0))
def test_power_law_sigma_closed_form(seed, alpha, m, delta):
    gas = GasModel(m, delta)
    model = ScatteringModel("PowerLawE", 1.0, alpha)
    for geom in random_geometries(10, gas, np.random.default_rng(seed)):
        assert sigma(model, geom, gas) == pytest.approx(sigma_power_law_closed(model, geom, gas), rel=1e-12)
