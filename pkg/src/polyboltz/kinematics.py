"""Binary collision geometry for molecules with a continuous internal energy.

Post-collision states are parametrized by a unit vector omega and two
energy fractions (r, R): R is the share of the total energy that goes into
relative translation, r the share of the remaining internal energy given to
the first particle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-14


class KinematicsError(ValueError):
    pass


@dataclass(frozen=True)
class GasModel:
    m: float = 1.0
    delta: float = 2.0

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise KinematicsError(f"mass must be positive, got {self.m}")
        if not (self.delta >= 2 and math.isfinite(self.delta)):
            raise KinematicsError(f"delta must be >= 2, got {self.delta}")


@dataclass(frozen=True)
class PhasePoint:
    v: np.ndarray
    I: float

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(3)
        object.__setattr__(self, "v", v)
        if not np.all(np.isfinite(v)) or not math.isfinite(self.I):
            raise KinematicsError("phase point has non-finite components")
        if not self.I > 0:
            raise KinematicsError(f"internal energy must be positive, got {self.I}")

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.v))


@dataclass(frozen=True)
class BLParams:
    omega: np.ndarray
    r: float
    R: float

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float).reshape(3)
        object.__setattr__(self, "omega", w)
        if abs(np.linalg.norm(w) - 1.0) > UNIT_TOL:
            raise KinematicsError(f"omega must be a unit vector, |omega| = {np.linalg.norm(w)!r}")
        for name in ("r", "R"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise KinematicsError(f"{name} must lie in [0, 1], got {x}")

    @property
    def on_boundary(self) -> bool:
        return self.r in (0.0, 1.0) or self.R in (0.0, 1.0)


@dataclass(frozen=True)
class CollisionPair:
    a: PhasePoint
    b: PhasePoint
    # set when a primed energy hit zero (boundary r or R); such states are
    # never produced on quadrature nodes
    boundary: bool = field(default=False, compare=False)

    @property
    def g(self) -> np.ndarray:
        return self.a.v - self.b.v

    @property
    def G(self) -> np.ndarray:
        return 0.5 * (self.a.v + self.b.v)

    @property
    def internal(self) -> float:
        return self.a.I + self.b.I


def _point(v, I) -> PhasePoint:
    # boundary states may carry I == 0, bypass the positivity check for them
    if I > 0:
        return PhasePoint(v, I)
    p = object.__new__(PhasePoint)
    object.__setattr__(p, "v", np.asarray(v, dtype=float).reshape(3))
    object.__setattr__(p, "I", float(I))
    return p


def total_energy(pair: CollisionPair, gas: GasModel) -> float:
    g = pair.g
    return 0.25 * gas.m * float(g @ g) + pair.a.I + pair.b.I


def bl_weight(r, R, gas: GasModel):
    """(r(1-r))^{d/2-1} (1-R)^{d-1} R^{1/2}; accepts scalars or arrays."""
    r = np.asarray(r, dtype=float)
    R = np.asarray(R, dtype=float)
    if np.any((r < 0) | (r > 1) | (R < 0) | (R > 1)):
        raise KinematicsError("r and R must lie in [0, 1]")
    d = gas.delta
    out = (r * (1.0 - r)) ** (0.5 * d - 1.0) * (1.0 - R) ** (d - 1.0) * np.sqrt(R)
    return out[()] if out.ndim == 0 else out


def post_collision_arrays(xi, xs, I, Is, omega, r, R, m=1.0):
    """Vectorized post-collision map.  All inputs broadcast; vectors on the last axis."""
    xi = np.asarray(xi, dtype=float)
    xs = np.asarray(xs, dtype=float)
    g = xi - xs
    E = 0.25 * m * np.sum(g * g, axis=-1) + I + Is
    G = 0.5 * (xi + xs)
    gp = np.sqrt(4.0 * R * E / m)[..., None] * omega
    Ip = r * (1.0 - R) * E
    Isp = (1.0 - r) * (1.0 - R) * E
    return G + 0.5 * gp, G - 0.5 * gp, Ip, Isp


def post_collision(pair: CollisionPair, p: BLParams, gas: GasModel) -> CollisionPair:
    E = total_energy(pair, gas)
    xp, xsp, Ip, Isp = post_collision_arrays(pair.a.v, pair.b.v, pair.a.I, pair.b.I,
                                             p.omega, p.r, p.R, gas.m)
    return CollisionPair(_point(xp, float(Ip)), _point(xsp, float(Isp)), boundary=p.on_boundary)


def inverse_params(pre: CollisionPair, post: CollisionPair, gas: GasModel) -> BLParams:
    """Parameters mapping ``post`` back onto ``pre``."""
    E = total_energy(pre, gas)
    g = pre.g
    gn = float(np.linalg.norm(g))
    if gn == 0.0:
        raise KinematicsError("reverse direction undefined for zero relative velocity")
    R = min(max(0.25 * gas.m * gn * gn / E, 0.0), 1.0)
    r = pre.a.I / ((1.0 - R) * E) if R < 1.0 else 0.5
    return BLParams(g / gn, min(max(r, 0.0), 1.0), R)


def delta_I(pre: CollisionPair, post: CollisionPair) -> float:
    """Change of total internal energy I' + I*' - I - I*."""
    return post.internal - pre.internal


def post_relative_speed_from_delta_I(pair: CollisionPair, dI: float, gas: GasModel) -> float:
    """|g'| expressed through the internal energy change; NaN when the collision is forbidden."""
    g2 = float(pair.g @ pair.g) - 4.0 * dI / gas.m
    return math.sqrt(g2) if g2 >= 0 else math.nan


def conservation_residual(pre: CollisionPair, post: CollisionPair, gas: GasModel):
    mom = (pre.a.v + pre.b.v) - (post.a.v + post.b.v)

    def energy(p: CollisionPair) -> float:
        return 0.5 * gas.m * (float(p.a.v @ p.a.v) + float(p.b.v @ p.b.v)) + p.a.I + p.b.I

    return mom, energy(pre) - energy(post)
