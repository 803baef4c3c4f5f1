"""Collision kernels B and cross sections sigma.

Four families are implemented:

* ``PowerLawE``   B = C E^{1 - alpha/2}
* ``GP20Model1``  B = b E^{alpha/2}
* ``GP20Model2``  B = b (R^{alpha/2}|g|^alpha + (1-R)^{alpha/2} ((I+I*)/m)^{alpha/2})
* ``GP20Model3``  B = b (R^{alpha/2}|g|^alpha + (r(1-R) I/m)^{alpha/2} + ((1-r)(1-R) I*/m)^{alpha/2})

Models 1-3 may carry an even angular factor b(cos theta), given as a table on a
uniform |cos theta| grid over [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .kinematics import CollisionPair, GasModel, KinematicsError, total_energy

VARIANT_CODES = {"PowerLawE": 0, "GP20Model1": 1, "GP20Model2": 2, "GP20Model3": 3}


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ScatteringModel:
    variant: str = "PowerLawE"
    C: float = 1.0
    alpha: float = 1.0
    gamma: float = 0.5
    angular_table: tuple = field(default=())

    def __post_init__(self):
        if self.variant not in VARIANT_CODES:
            raise ModelError(f"unknown model variant {self.variant!r}")
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ModelError(f"prefactor must be positive, got {self.C}")
        if self.variant == "PowerLawE":
            if not 0.0 <= self.alpha <= 2.0:
                raise ModelError(f"PowerLawE needs 0 <= alpha <= 2, got {self.alpha}")
            if self.angular_table:
                raise ModelError("PowerLawE has no angular factor")
        elif not 0.0 < self.alpha <= 2.0:
            raise ModelError(f"{self.variant} needs 0 < alpha <= 2, got {self.alpha}")
        if not 0.0 < self.gamma < 1.0:
            raise ModelError(f"gamma must lie in (0, 1), got {self.gamma}")
        tab = tuple(float(x) for x in self.angular_table)
        if any(not (x >= 0 and math.isfinite(x)) for x in tab):
            raise ModelError("angular table must be finite and nonnegative")
        object.__setattr__(self, "angular_table", tab)

    @property
    def code(self) -> int:
        return VARIANT_CODES[self.variant]

    @property
    def b(self) -> float:
        return self.C

    @property
    def isotropic(self) -> bool:
        return not self.angular_table

    @property
    def edge_case(self) -> bool:
        """alpha = 2 for the power law lies outside the growth-bound hypothesis."""
        return self.variant == "PowerLawE" and self.alpha >= 2.0

    def table_array(self) -> np.ndarray:
        return np.asarray(self.angular_table, dtype=float)

    def angular_mean(self) -> float:
        """Average of b(cos theta) over the unit sphere."""
        if not self.angular_table:
            return 1.0
        t = self.table_array()
        if t.size == 1:
            return float(t[0])
        # exact for the piecewise-linear interpolant
        return float(np.trapezoid(t, dx=1.0 / (t.size - 1)))

    def angular(self, cos_abs):
        if not self.angular_table:
            return np.ones_like(np.asarray(cos_abs, dtype=float))
        t = self.table_array()
        if t.size == 1:
            return np.full_like(np.asarray(cos_abs, dtype=float), t[0])
        return np.interp(cos_abs, np.linspace(0.0, 1.0, t.size), t)


def kernel_value(model: ScatteringModel, m, E, gpre2, gpost2, Ia, Ib, Ipa, Ipb, cos_abs=None):
    """Array form of B.  ``gpre2``/``gpost2`` are squared relative speeds,
    (Ia, Ib) the energies before and (Ipa, Ipb) after the collision."""
    E = np.asarray(E, dtype=float)
    h = 0.5 * model.alpha
    c = model.C
    if model.variant == "PowerLawE":
        val = np.where(E > 0, c * np.abs(E) ** (1.0 - h), 0.0)
        return val
    if model.variant == "GP20Model1":
        val = c * np.abs(E) ** h
    else:
        R = m * gpost2 / (4.0 * E)
        t1 = (R * gpre2) ** h
        if model.variant == "GP20Model2":
            val = c * (t1 + ((Ipa + Ipb) / E * (Ia + Ib) / m) ** h)
        else:
            val = c * (t1 + (Ipa * Ia / (E * m)) ** h + (Ipb * Ib / (E * m)) ** h)
    if model.angular_table:
        val = val * model.angular(np.abs(cos_abs))
    return np.where(E > 0, val, 0.0)


@dataclass(frozen=True)
class CollisionGeometry:
    pre: CollisionPair
    post: CollisionPair
    E: float
    R: float
    r: float
    cos_theta: float
    dI: float

    @classmethod
    def from_pairs(cls, pre: CollisionPair, post: CollisionPair, gas: GasModel, rtol=1e-10):
        E = total_energy(pre, gas)
        Ep = total_energy(post, gas)
        if abs(Ep - E) > rtol * E:
            raise ModelError(f"pre/post energies differ: {E} vs {Ep}")
        g, gp = pre.g, post.g
        ng, ngp = float(np.linalg.norm(g)), float(np.linalg.norm(gp))
        R = min(max(0.25 * gas.m * ngp * ngp / E, 0.0), 1.0)
        rest = (1.0 - R) * E
        r = post.a.I / rest if rest > 0 else 0.5
        cos = float(g @ gp) / (ng * ngp) if ng > 0 and ngp > 0 else 0.0
        return cls(pre, post, E, R, min(max(r, 0.0), 1.0), cos, post.internal - pre.internal)

    def reversed(self, gas: GasModel) -> "CollisionGeometry":
        return CollisionGeometry.from_pairs(self.post, self.pre, gas)

    @property
    def g_norm(self) -> float:
        return float(np.linalg.norm(self.pre.g))

    @property
    def gp_norm(self) -> float:
        return float(np.linalg.norm(self.post.g))


def kernel_B(model: ScatteringModel, geom: CollisionGeometry, gas: GasModel) -> float:
    pre, post = geom.pre, geom.post
    val = kernel_value(model, gas.m, geom.E, geom.g_norm ** 2, geom.gp_norm ** 2,
                       pre.a.I, pre.b.I, post.a.I, post.b.I, abs(geom.cos_theta))
    return float(val)


def _sigma_factor(geom: CollisionGeometry, gas: GasModel) -> float:
    d = gas.delta
    R, r = geom.R, geom.r
    return (1.0 - R) ** (d - 2.0) * math.sqrt(R) * (r * (1.0 - r)) ** (0.5 * d - 1.0) / (geom.g_norm * geom.E ** 2)


def sigma(model: ScatteringModel, geom: CollisionGeometry, gas: GasModel) -> float:
    """Cross section obtained by inverting the kernel/cross-section relation."""
    if geom.g_norm == 0.0:
        raise ModelError("sigma is singular for zero relative velocity")
    if not (0.0 < geom.R < 1.0 and 0.0 < geom.r < 1.0):
        raise ModelError(f"sigma needs interior r, R; got r={geom.r}, R={geom.R}")
    return kernel_B(model, geom, gas) * _sigma_factor(geom, gas)


def kernel_from_sigma(sig: float, geom: CollisionGeometry, gas: GasModel) -> float:
    return sig / _sigma_factor(geom, gas)


def sigma_power_law_closed(model: ScatteringModel, geom: CollisionGeometry, gas: GasModel) -> float:
    """Closed-form cross section of the power-law family.

    Written with the kernel prefactor C; the cross-section prefactor is
    C sqrt(m)/2.
    """
    if model.variant != "PowerLawE":
        raise ModelError("closed form only exists for PowerLawE")
    d, a = gas.delta, model.alpha
    Ip, Isp = geom.post.a.I, geom.post.b.I
    cs = model.C * math.sqrt(gas.m) / 2.0
    return cs * geom.gp_norm / (geom.g_norm * geom.E ** (d + 0.5 * (a - 1.0))) * (Ip * Isp) ** (0.5 * d - 1.0)


@dataclass
class EnvelopeReport:
    holds: bool
    worst_ratio: float
    witness: CollisionGeometry | None
    n_used: int
    in_hypothesis: bool


def envelope_check_est1a(model: ScatteringModel, gas: GasModel,
                         samples: Sequence[CollisionGeometry], gamma: float) -> EnvelopeReport:
    """Largest observed B / (E (1 + Psi^{-(1 - gamma/2)})), Psi = |g||g'|."""
    if not 0.0 < gamma < 1.0:
        raise ModelError(f"gamma must lie in (0, 1), got {gamma}")
    if len(samples) == 0:
        raise ModelError("empty sample set")
    worst, witness, used = -math.inf, None, 0
    for geom in samples:
        g2 = geom.g_norm ** 2
        if gas.m * g2 <= 4.0 * geom.dI:
            continue
        psi = geom.g_norm * math.sqrt(g2 - 4.0 * geom.dI / gas.m)
        if psi <= 0.0:
            continue
        ratio = kernel_B(model, geom, gas) / (geom.E * (1.0 + psi ** -(1.0 - 0.5 * gamma)))
        used += 1
        if ratio > worst:
            worst, witness = ratio, geom
    holds = used > 0 and math.isfinite(worst)
    return EnvelopeReport(holds, worst, witness, used, not model.edge_case)


def random_geometries(n: int, gas: GasModel, rng: np.random.Generator,
                      e_range=(0.01, 100.0)) -> list[CollisionGeometry]:
    """Random interior collisions with total energy log-uniform in ``e_range``."""
    from .kinematics import BLParams, PhasePoint, post_collision

    out = []
    lo, hi = np.log(e_range[0]), np.log(e_range[1])
    while len(out) < n:
        E = float(np.exp(rng.uniform(lo, hi)))
        R0, r0 = rng.uniform(0.02, 0.98, size=2)
        gdir = rng.normal(size=3)
        gdir /= np.linalg.norm(gdir)
        g = math.sqrt(4.0 * R0 * E / gas.m) * gdir
        G = rng.normal(size=3)
        Ia = r0 * (1.0 - R0) * E
        Ib = (1.0 - r0) * (1.0 - R0) * E
        try:
            pre = CollisionPair(PhasePoint(G + 0.5 * g, Ia), PhasePoint(G - 0.5 * g, Ib))
            w = rng.normal(size=3)
            w /= np.linalg.norm(w)
            p = BLParams(w, float(rng.uniform(0.02, 0.98)), float(rng.uniform(0.02, 0.98)))
            out.append(CollisionGeometry.from_pairs(pre, post_collision(pre, p, gas), gas))
        except (KinematicsError, ModelError):
            continue
    return out
