"""Quadrature rules and a reproducible Monte-Carlo integrator."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution knobs.

    ``n_interval``/``n_semi`` drive the outer velocity/energy rules,
    ``n_plane_*``, ``n_chi`` and ``n_energy`` the inner k2 integral, ``n_mu``
    the relative-angle average used by the isotropic reduction.
    """

    n_interval: int = 12
    n_semi: int = 8
    sphere_order: int = 7
    n_plane_radial: int = 12
    n_plane_angular: int = 8
    n_chi: int = 8
    n_energy: int = 8
    n_mu: int = 8
    n_rR: int = 8
    mc_samples: int = 200_000
    mc_seed: int = 20240531
    v_max: float = 8.0
    I_max: float = 30.0

    def __post_init__(self):
        for name in ("n_interval", "n_semi", "sphere_order", "n_plane_radial", "n_plane_angular",
                     "n_chi", "n_energy", "n_mu", "n_rR", "mc_samples"):
            if int(getattr(self, name)) < 2:
                raise QuadratureError(f"{name} must be >= 2")
        if not (self.v_max > 0 and self.I_max > 0):
            raise QuadratureError("truncation bounds must be positive")

    def scaled(self, factor: float) -> "QuadratureSpec":
        """Copy with every deterministic count multiplied by ``factor``."""
        names = ("n_interval", "n_semi", "sphere_order", "n_plane_radial", "n_plane_angular",
                 "n_chi", "n_energy", "n_mu", "n_rR")
        kw = {k: max(2, int(round(getattr(self, k) * factor))) for k in names}
        return self.replace(**kw)

    def replace(self, **kw) -> "QuadratureSpec":
        from dataclasses import replace
        return replace(self, **kw)


@dataclass(frozen=True)
class Rule:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise QuadratureError("rule weights must be positive")

    def __len__(self):
        return len(self.weights)

    def integrate(self, f: Callable) -> float:
        return float(np.sum(self.weights * f(self.nodes)))


def interval_rule(n: int, a: float, b: float) -> Rule:
    """Gauss-Legendre rule on [a, b]."""
    if n < 1:
        raise QuadratureError("need at least one node")
    if not b > a:
        raise QuadratureError(f"degenerate interval [{a}, {b}]")
    x, w = np.polynomial.legendre.leggauss(n)
    return Rule(0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w)


def semi_infinite_rule(n: int, scale: float = 1.0, power: float = 0.0) -> Rule:
    """Gauss rule for int_0^inf x^power e^{-x/scale} p(x) dx; the weight function
    is built into the weights, so ``sum(w * p(x))`` approximates the integral."""
    if n < 1:
        raise QuadratureError("need at least one node")
    if not scale > 0:
        raise QuadratureError("scale must be positive")
    if power == 0.0:
        x, w = special.roots_laguerre(n)
    else:
        x, w = special.roots_genlaguerre(n, power)
    return Rule(scale * x, w * scale ** (power + 1.0))


def jacobi01_rule(n: int, a: float, b: float) -> Rule:
    """Gauss rule on [0, 1] for the weight (1-x)^a x^b."""
    x, w = special.roots_jacobi(n, a, b)
    return Rule(0.5 * (x + 1.0), w / 2.0 ** (a + b + 1.0))


def maxwell_rule(n: int, m: float = 1.0) -> Rule:
    """Gauss rule for int_0^inf s^2 e^{-m s^2/2} p(s) ds (nodes are speeds)."""
    t, w = special.roots_genlaguerre(n, 0.5)
    s = np.sqrt(2.0 * t / m)
    return Rule(s, w * (2.0 / m) ** 1.5 / 2.0)


def sphere_rule(order: int) -> Rule:
    """Product rule on the unit sphere exact for spherical harmonics of degree <= order.

    Gauss-Legendre in cos(theta) times a uniform rule in the azimuth.
    """
    if order < 1:
        raise QuadratureError("order must be >= 1")
    nt = order // 2 + 1
    nphi = order + 1
    ct, wt = np.polynomial.legendre.leggauss(nt)
    phi = 2.0 * np.pi * (np.arange(nphi) + 0.5) / nphi
    st = np.sqrt(1.0 - ct * ct)
    nodes = np.stack([
        np.outer(st, np.cos(phi)).ravel(),
        np.outer(st, np.sin(phi)).ravel(),
        np.repeat(ct, nphi),
    ], axis=-1)
    weights = np.repeat(wt, nphi) * (2.0 * np.pi / nphi)
    return Rule(nodes, weights)


def tensor(*rules: Rule) -> Rule:
    """Tensor product of 1-d rules; nodes returned as an (N, d) array."""
    grids = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
    wgrid = np.meshgrid(*[r.weights for r in rules], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    w = np.ones(nodes.shape[0])
    for g in wgrid:
        w = w * g.ravel()
    return Rule(nodes, w)


# --- Monte Carlo --------------------------------------------------------------

@dataclass(frozen=True)
class Sampler:
    """Named sampling distribution: ``draw(rng, k)`` and a density for sanity checks."""

    name: str
    dim: int
    draw: Callable
    density: Callable


def _normal_density(x):
    x = np.atleast_2d(x)
    return np.exp(-0.5 * np.sum(x * x, axis=-1)) / (2.0 * np.pi) ** (x.shape[-1] / 2.0)


SAMPLERS = {
    "normal1": Sampler("normal1", 1, lambda rng, k: rng.standard_normal((k, 1)), _normal_density),
    "normal3": Sampler("normal3", 3, lambda rng, k: rng.standard_normal((k, 3)), _normal_density),
    "uniform1": Sampler("uniform1", 1, lambda rng, k: rng.random((k, 1)),
                        lambda x: np.ones(np.atleast_2d(x).shape[0])),
}

MC_BLOCK = 8192


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Independent generator for block ``block`` of the stream keyed by ``seed``.

    Philox is counter based: the block index goes into the second counter word,
    so blocks never overlap and any block can be produced in isolation.
    """
    key = np.random.SeedSequence(int(seed)).generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, block, 0, 0]))


def mc_blocks(n: int, block: int = MC_BLOCK):
    return [(b, min(block, n - b * block)) for b in range(math.ceil(n / block))]


def mc_reduce(fn: Callable, n: int, seed: int, workers: int = 1, block: int = MC_BLOCK):
    """Run ``fn(rng, k) -> values`` over all blocks and return (mean, stderr).

    Block partials are combined in index order, so the result does not depend
    on ``workers``.
    """
    jobs = mc_blocks(n, block)

    def one(job):
        b, k = job
        v = np.asarray(fn(block_generator(seed, b), k), dtype=float)
        if v.shape != (k,):
            raise QuadratureError(f"integrand returned shape {v.shape}, expected ({k},)")
        if not np.all(np.isfinite(v)):
            raise QuadratureError(f"non-finite integrand value in block {b}")
        return np.sum(v), np.sum(v * v)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(one, jobs))
    else:
        parts = [one(j) for j in jobs]
    s1 = np.sum(np.array([p[0] for p in parts]))
    s2 = np.sum(np.array([p[1] for p in parts]))
    mean = s1 / n
    var = max(s2 - s1 * s1 / n, 0.0) / max(n - 1, 1)
    return float(mean), float(math.sqrt(var / n))


def mc_integrate(f: Callable, sampler: str | Sampler, n: int, seed: int, workers: int = 1):
    """Estimate E[f(X)] for X drawn from ``sampler``; returns (estimate, stderr)."""
    smp = SAMPLERS[sampler] if isinstance(sampler, str) else sampler
    if n < 1:
        raise QuadratureError("need at least one sample")

    def fn(rng, k):
        x = smp.draw(rng, k)
        if np.any(smp.density(x) <= 0):
            raise QuadratureError(f"sampler {smp.name} produced a zero-density point")
        return f(x)

    return mc_reduce(fn, n, seed, workers)
