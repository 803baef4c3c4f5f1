"""Maxwellians, collision invariants and the L2(dxi dI) inner product."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special
from scipy.interpolate import RegularGridInterpolator

from .kinematics import GasModel, PhasePoint
from .quadrature import QuadratureSpec, Rule, interval_rule


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class MaxwellianParams:
    n: float = 1.0
    u: tuple = (0.0, 0.0, 0.0)
    T: float = 1.0

    def __post_init__(self):
        u = tuple(float(x) for x in np.asarray(self.u, dtype=float).reshape(3))
        object.__setattr__(self, "u", u)
        if not (self.n > 0 and self.T > 0):
            raise DistributionError(f"need n > 0 and T > 0, got n={self.n}, T={self.T}")


STANDARD = MaxwellianParams()


class InvariantIndex(enum.Enum):
    mass = 0
    px = 1
    py = 2
    pz = 3
    energy = 4


def maxwellian_arrays(params: MaxwellianParams, gas: GasModel, v, I):
    v = np.asarray(v, dtype=float)
    I = np.asarray(I, dtype=float)
    d, m, T = gas.delta, gas.m, params.T
    c = v - np.asarray(params.u)
    norm = params.n * m ** 1.5 / ((2.0 * np.pi) ** 1.5 * T ** (0.5 * (d + 3.0)) * special.gamma(0.5 * d))
    return norm * I ** (0.5 * d - 1.0) * np.exp(-(m * np.sum(c * c, axis=-1) + 2.0 * I) / (2.0 * T))


def maxwellian(params: MaxwellianParams, gas: GasModel, p: PhasePoint) -> float:
    return float(maxwellian_arrays(params, gas, p.v, p.I))


def sqrt_maxwellian(gas: GasModel, v, I):
    """Square root of the standard Maxwellian (n = 1, u = 0, T = 1)."""
    return np.sqrt(maxwellian_arrays(STANDARD, gas, v, I))


def invariant_arrays(idx: InvariantIndex, gas: GasModel, v, I):
    v = np.asarray(v, dtype=float)
    I = np.asarray(I, dtype=float)
    if idx is InvariantIndex.mass:
        return np.ones(np.broadcast_shapes(v.shape[:-1], I.shape))
    if idx is InvariantIndex.energy:
        return gas.m * np.sum(v * v, axis=-1) + 2.0 * I
    return np.broadcast_to(v[..., idx.value - 1], np.broadcast_shapes(v.shape[:-1], I.shape)).copy()


def invariant(idx: InvariantIndex, p: PhasePoint, gas: GasModel) -> float:
    return float(invariant_arrays(idx, gas, p.v, p.I))


@dataclass(frozen=True)
class Field:
    """A function of (velocity, internal energy) evaluated on arrays.

    ``fn(v, I)`` takes v with shape (..., 3) and I with shape (...).  Fields
    built with a closed form may be evaluated anywhere; grid fields return 0
    outside their box.
    """

    fn: Callable
    name: str = "field"
    closed_form: bool = True
    isotropic: bool = False

    def __call__(self, v, I):
        return self.fn(np.asarray(v, dtype=float), np.asarray(I, dtype=float))

    def at(self, p: PhasePoint) -> float:
        return float(self(p.v, p.I))

    def __mul__(self, other: "Field") -> "Field":
        return Field(lambda v, I: self.fn(v, I) * other.fn(v, I), f"{self.name}*{other.name}",
                     self.closed_form and other.closed_form, self.isotropic and other.isotropic)

    @classmethod
    def from_grid(cls, axes, values, name="grid") -> "Field":
        """Tensor-product cubic interpolant on axes (vx, vy, vz, I)."""
        interp = RegularGridInterpolator(tuple(np.asarray(a, dtype=float) for a in axes),
                                         np.asarray(values, dtype=float), method="cubic",
                                         bounds_error=False, fill_value=0.0)

        def fn(v, I):
            v, I = np.broadcast_arrays(v, I[..., None])
            pts = np.concatenate([v, I[..., :1]], axis=-1)
            return interp(pts.reshape(-1, 4)).reshape(pts.shape[:-1])

        return cls(fn, name, closed_form=False)


def maxwellian_field(params: MaxwellianParams, gas: GasModel) -> Field:
    iso = params.u == (0.0, 0.0, 0.0)
    return Field(lambda v, I: maxwellian_arrays(params, gas, v, I), "maxwellian", True, iso)


def sqrt_maxwellian_field(gas: GasModel) -> Field:
    return Field(lambda v, I: sqrt_maxwellian(gas, v, I), "sqrt_maxwellian", True, True)


def invariant_field(idx: InvariantIndex, gas: GasModel) -> Field:
    iso = idx in (InvariantIndex.mass, InvariantIndex.energy)
    return Field(lambda v, I: invariant_arrays(idx, gas, v, I), idx.name, True, iso)


# panel edges for the energy direction, as fractions of I_max
_ENERGY_PANELS = np.array([0.0, 1.0, 3.0, 7.0, 15.0, 30.0]) / 30.0
_VELOCITY_PANELS = 4


@lru_cache(maxsize=16)
def _phase_rules(n_interval: int, n_semi: int, v_max: float, I_max: float):
    k = max(2, (5 * n_interval) // 6)
    edges = np.linspace(-v_max, v_max, _VELOCITY_PANELS + 1)
    parts = [interval_rule(k, a, b) for a, b in zip(edges[:-1], edges[1:])]
    vr = Rule(np.concatenate([p.nodes for p in parts]), np.concatenate([p.weights for p in parts]))
    eedges = _ENERGY_PANELS * I_max
    parts = [interval_rule(n_semi, a, b) for a, b in zip(eedges[:-1], eedges[1:])]
    er = Rule(np.concatenate([p.nodes for p in parts]), np.concatenate([p.weights for p in parts]))
    return vr, er


def phase_rules(quad: QuadratureSpec):
    """1-d rules (velocity component, internal energy) of the truncated phase-space box."""
    return _phase_rules(quad.n_interval, quad.n_semi, float(quad.v_max), float(quad.I_max))


def _check_finite(vals, v, I, what):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = np.flatnonzero(bad.ravel())[0]
        vv = np.broadcast_to(v, vals.shape + (3,)).reshape(-1, 3)[i]
        II = np.broadcast_to(I, vals.shape).ravel()[i]
        raise DistributionError(f"non-finite {what} at xi={vv.tolist()}, I={II!r}")


def integrate_phase(fn: Callable, quad: QuadratureSpec) -> float:
    """int fn(v, I) dv dI over [-v_max, v_max]^3 x (0, I_max]."""
    vr, er = phase_rules(quad)
    x = vr.nodes
    V = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1)  # (n, n, n, 3)
    Wv = np.einsum("i,j,k->ijk", vr.weights, vr.weights, vr.weights)
    total = 0.0
    for I, wI in zip(er.nodes, er.weights):
        vals = np.asarray(fn(V, np.full(V.shape[:-1], I)), dtype=float)
        _check_finite(vals, V, I, "integrand")
        total += wI * np.sum(Wv * vals)
    return float(total)


def inner_product(f: Field, g: Field, quad: QuadratureSpec) -> float:
    return integrate_phase(lambda v, I: f(v, I) * g(v, I), quad)


def moments(f: Field, gas: GasModel, quad: QuadratureSpec, tol: float = 1e-12) -> MaxwellianParams:
    n = integrate_phase(f, quad)
    if not n > tol:
        raise DistributionError(f"degenerate distribution, density {n!r}")
    u = np.array([integrate_phase(lambda v, I, k=k: f(v, I) * v[..., k], quad) for k in range(3)]) / n
    T = gas.m / (3.0 * n) * integrate_phase(lambda v, I: f(v, I) * np.sum((v - u) ** 2, axis=-1), quad)
    return MaxwellianParams(n, tuple(u), T)
