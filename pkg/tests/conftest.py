"""Shared, session-cached objects.  Expensive assemblies and quadratures are
computed once and reused by the unit tests and the acceptance tests."""

from __future__ import annotations

from functools import lru_cache

import pytest

from polyboltz import spectral as sp
from polyboltz import verify as ver
from polyboltz.kinematics import GasModel
from polyboltz.models import ScatteringModel
from polyboltz.quadrature import QuadratureSpec

GAS = GasModel(1.0, 2.0)
QUAD = QuadratureSpec()
# cheap resolution for tests that only exercise plumbing
COARSE = QuadratureSpec(n_interval=6, n_semi=4, sphere_order=3, n_plane_radial=6, n_plane_angular=4,
                        n_chi=4, n_energy=4, n_mu=4, n_rR=4, mc_samples=2000)


def power_law(alpha: float = 1.0) -> ScatteringModel:
    return ScatteringModel("PowerLawE", 1.0, alpha)


@lru_cache(maxsize=None)
def iso_op(alpha: float = 1.0, dims: tuple = sp.DEFAULT_DIMS[sp.ISOTROPIC]) -> sp.NystromOperator:
    return sp.assemble(sp.make_grid(sp.ISOTROPIC, dims, GAS), GAS, power_law(alpha), QUAD)


@lru_cache(maxsize=None)
def full_op(alpha: float = 1.0, dims: tuple = sp.DEFAULT_DIMS[sp.FULL]) -> sp.NystromOperator:
    return sp.assemble(sp.make_grid(sp.FULL, dims, GAS), GAS, power_law(alpha), QUAD)


@lru_cache(maxsize=None)
def refined_iso_op(alpha: float = 1.0) -> sp.NystromOperator:
    dims = tuple(int(round(1.5 * d)) for d in sp.DEFAULT_DIMS[sp.ISOTROPIC])
    return iso_op(alpha, dims)


@lru_cache(maxsize=None)
def lgd_probe(alpha: float = 1.0) -> sp.LGDProbe:
    return sp.lgd_truncation_probe(GAS, power_law(alpha), QUAD)


@lru_cache(maxsize=None)
def accept_context() -> ver.Context:
    """Default-resolution verification context sharing the cached operators."""
    ctx = ver.Context(GAS, power_law(1.0), QUAD)
    ctx.__dict__.update(iso_op=iso_op(1.0), refined_op=refined_iso_op(1.0), full_op=full_op(1.0))
    return ctx


@lru_cache(maxsize=None)
def suite_checks(name: str) -> tuple:
    ctx = accept_context()
    if name == "spectral":
        return tuple(ver.spectral_checks(ctx, lgd=False))
    return tuple(ver.run_suite(name, ctx))


# criterion number -> summary line, filled by the acceptance tests
CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])


@pytest.fixture(scope="session")
def gas():
    return GAS


@pytest.fixture(scope="session")
def quad():
    return QUAD


@pytest.fixture(scope="session")
def coarse():
    return COARSE
