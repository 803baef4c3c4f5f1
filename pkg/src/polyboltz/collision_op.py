"""Nonlinear collision operator Q(f, f), its weak form, the entropy
production functional and the quadratic remainder of the linearization.

All integrals are taken in the (omega, r, R) parametrization of the
post-collision states, so no delta function is ever evaluated.  With
F = f / I^{delta/2-1} the operator reads

    Q(f,f)(xi, I) = int B (F'F*' - FF*) w(r, R) (I I*)^{delta/2-1} domega dr dR dxi* dI*

where w is the Borgnakke-Larsen weight.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .distributions import Field, sqrt_maxwellian
from .kinematics import GasModel
from .models import ScatteringModel, kernel_value
from .quadrature import QuadratureSpec, Rule, jacobi01_rule, maxwell_rule, sphere_rule, tensor

log = logging.getLogger(__name__)


class CollisionOpError(ValueError):
    pass


def _hermite(n: int, m: float) -> Rule:
    """Unweighted rule for int_R h(x) dx built on Gauss-Hermite nodes of e^{-m x^2/2}."""
    x, w = special.roots_hermitenorm(n)
    return Rule(x / math.sqrt(m), w * np.exp(0.5 * x * x) / math.sqrt(m))


def _laguerre(n: int) -> Rule:
    x, w = special.roots_laguerre(n)
    return Rule(x, w * np.exp(x))


@dataclass(frozen=True)
class CollisionRules:
    xs: Rule        # partner velocity, (K, 3)
    Is: Rule        # partner internal energy
    r: Rule         # weight (r(1-r))^{d/2-1}
    R: Rule         # weight (1-R)^{d-1} R^{1/2}
    omega: Rule     # unit sphere
    outer: Rule     # (xi, I) points, (N, 4), used for route comparisons

    @classmethod
    def from_spec(cls, quad: QuadratureSpec, gas: GasModel) -> "CollisionRules":
        d, m = gas.delta, gas.m
        nv = max(2, quad.n_semi - 2)
        ne = max(2, quad.n_semi // 2)
        nrr = max(2, quad.n_rR // 2)
        h = _hermite(nv, m)
        xs = tensor(h, h, h)
        outer = tensor(h, h, h, _laguerre(ne))
        return cls(xs, _laguerre(ne), jacobi01_rule(nrr, 0.5 * d - 1.0, 0.5 * d - 1.0),
                   jacobi01_rule(nrr, d - 1.0, 0.5), sphere_rule(max(1, quad.sphere_order // 2)), outer)


def _eval_field(f: Field, v, I, box=None):
    vals = np.asarray(f(v, I), dtype=float)
    if not np.all(np.isfinite(vals)):
        i = int(np.flatnonzero(~np.isfinite(vals.ravel()))[0])
        vv = np.asarray(v).reshape(-1, 3)[i]
        raise CollisionOpError(f"non-finite field value at xi={vv.tolist()}, I={np.asarray(I).ravel()[i]!r}")
    if box is not None and not f.closed_form:
        vmax, Imax = box
        out = (np.abs(v).max(axis=-1) > vmax) | (I > Imax)
        if np.any(out):
            log.info("%s: %d of %d primed states outside the box, extended by 0",
                     f.name, int(out.sum()), out.size)
    return vals


def _collision_terms(f: Field, xi, I, xs, Is, omega, r, R, gas: GasModel, model: ScatteringModel):
    """Returns (B w (I I*)^p, F F*, F' F*') on broadcast arrays, plus the primed states.

    xi, xs, omega carry vectors on the last axis; everything broadcasts.
    """
    m, p = gas.m, 0.5 * gas.delta - 1.0
    g = xi - xs
    g2 = np.sum(g * g, axis=-1)
    E = 0.25 * m * g2 + I + Is
    G = 0.5 * (xi + xs)
    gpn = np.sqrt(4.0 * R * E / m)
    Ip = r * (1.0 - R) * E
    Isp = (1.0 - r) * (1.0 - R) * E
    xp = G + 0.5 * gpn[..., None] * omega
    xsp = G - 0.5 * gpn[..., None] * omega
    cos = None
    if model.angular_table:
        gn = np.sqrt(g2)
        cos = np.abs(np.sum(g * omega, axis=-1)) / np.where(gn > 0, gn, 1.0)
    B = kernel_value(model, m, E, g2, gpn * gpn, I, Is, Ip, Isp, cos)
    shape = np.broadcast_shapes(B.shape, Ip.shape, xp.shape[:-1], np.shape(I), np.shape(Is))
    fa = _eval_field(f, np.broadcast_to(xi, shape + (3,)), np.broadcast_to(I, shape))
    fb = _eval_field(f, np.broadcast_to(xs, shape + (3,)), np.broadcast_to(Is, shape))
    fpa = _eval_field(f, np.broadcast_to(xp, shape + (3,)), np.broadcast_to(Ip, shape))
    fpb = _eval_field(f, np.broadcast_to(xsp, shape + (3,)), np.broadcast_to(Isp, shape))
    B = np.broadcast_to(B, shape)
    if p != 0.0:
        pre = (I * Is) ** p
        FF = fa * fb / pre
        FFp = fpa * fpb / (Ip * Isp) ** p
        meas = B * pre
    else:
        FF, FFp, meas = fa * fb, fpa * fpb, B
    return meas, FF, FFp, (xp, xsp, Ip, Isp)


def q_values(f: Field, V, I, gas: GasModel, model: ScatteringModel, rules: CollisionRules, chunk: int = 4):
    """Q(f, f) at many phase points; V has shape (N, 3), I shape (N,)."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    I = np.atleast_1d(np.asarray(I, dtype=float))
    xs = rules.xs.nodes[:, None, None, None, None, :]
    Is = rules.Is.nodes[None, :, None, None, None]
    r = rules.r.nodes[None, None, :, None, None]
    R = rules.R.nodes[None, None, None, :, None]
    om = rules.omega.nodes[None, None, None, None, :, :]
    W = (rules.xs.weights[:, None, None, None, None] * rules.Is.weights[None, :, None, None, None]
         * rules.r.weights[None, None, :, None, None] * rules.R.weights[None, None, None, :, None]
         * rules.omega.weights[None, None, None, None, :])
    out = np.empty(len(I))
    for k in range(len(I)):
        meas, FF, FFp, _ = _collision_terms(f, V[k], I[k], xs, Is, om, r, R, gas, model)
        out[k] = np.sum(W * meas * (FFp - FF))
    return out


def q_eval(f: Field, p, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> float:
    rules = CollisionRules.from_spec(quad, gas)
    return float(q_values(f, p.v[None, :], np.array([p.I]), gas, model, rules)[0])


def q_gain_loss(f: Field, p, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec):
    """Gain and loss integrals at p separately, Q = gain - loss."""
    rules = CollisionRules.from_spec(quad, gas)
    xs = rules.xs.nodes[:, None, None, None, None, :]
    Is = rules.Is.nodes[None, :, None, None, None]
    r = rules.r.nodes[None, None, :, None, None]
    R = rules.R.nodes[None, None, None, :, None]
    om = rules.omega.nodes[None, None, None, None, :, :]
    W = (rules.xs.weights[:, None, None, None, None] * rules.Is.weights[None, :, None, None, None]
         * rules.r.weights[None, None, :, None, None] * rules.R.weights[None, None, None, :, None]
         * rules.omega.weights[None, None, None, None, :])
    meas, FF, FFp, _ = _collision_terms(f, p.v, p.I, xs, Is, om, r, R, gas, model)
    return float(np.sum(W * meas * FFp)), float(np.sum(W * meas * FF))


def q_field(f: Field, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> Field:
    """Q(f, f) as an evaluable field (expensive; meant for coarse outer rules)."""
    rules = CollisionRules.from_spec(quad, gas)

    def fn(v, I):
        shape = I.shape
        vals = q_values(f, v.reshape(-1, 3), I.ravel(), gas, model, rules)
        return vals.reshape(shape)

    return Field(fn, f"Q({f.name})", closed_form=True)


def q_inner_pointwise(f: Field, g: Field, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> float:
    """<Q(f, f), g> by evaluating Q pointwise on the outer (xi, I) rule.

    Independent of the weak form: no primed test function is ever evaluated.
    """
    rules = CollisionRules.from_spec(quad, gas)
    V, I = rules.outer.nodes[:, :3], rules.outer.nodes[:, 3]
    vals = q_values(f, V, I, gas, model, rules)
    return float(np.sum(rules.outer.weights * vals * _eval_field(g, V, I)))


def q_eval_mc(f: Field, p, gas: GasModel, model: ScatteringModel, n: int, seed: int, workers: int = 1):
    """Monte-Carlo estimate of Q(f, f)(p) over the same parametrization.

    Sampler: xi* from the standard Maxwellian, I* ~ Gamma(delta/2), r and R
    uniform, omega uniform on the sphere.
    """
    from .quadrature import mc_reduce

    m, d = gas.m, gas.delta
    lnZ = 1.5 * math.log(m / (2.0 * math.pi)) - math.lgamma(0.5 * d)

    def fn(rng, k):
        xs = rng.standard_normal((k, 3)) / math.sqrt(m)
        Is = rng.gamma(0.5 * d, size=k)
        r = rng.random(k)
        R = rng.random(k)
        om = rng.standard_normal((k, 3))
        om /= np.linalg.norm(om, axis=-1, keepdims=True)
        dens = np.exp(lnZ + (0.5 * d - 1.0) * np.log(Is) - 0.5 * m * np.sum(xs * xs, axis=-1) - Is) / (4.0 * math.pi)
        if np.any(dens <= 0):
            raise CollisionOpError("zero sampling density")
        w = (r * (1.0 - r)) ** (0.5 * d - 1.0) * (1.0 - R) ** (d - 1.0) * np.sqrt(R)
        meas, FF, FFp, _ = _collision_terms(f, p.v[None, :], p.I, xs, Is, om, r, R, gas, model)
        return meas * w * (FFp - FF) / dens

    return mc_reduce(fn, n, seed, workers)


# --- weak forms over (G, g) coordinates ----------------------------------------

@dataclass(frozen=True)
class WeakRules:
    G: Rule          # (K, 3), centre of mass velocity
    g: Rule          # relative speed
    ghat: Rule       # direction of g
    I: Rule
    r: Rule
    R: Rule
    omega: Rule

    @classmethod
    def from_spec(cls, quad: QuadratureSpec, gas: GasModel) -> "WeakRules":
        d, m = gas.delta, gas.m
        nG = max(2, quad.n_semi // 2 + 1)
        ne = max(2, quad.n_semi // 2)
        nrr = max(2, quad.n_rR // 2)
        hG = _hermite(nG, 2.0 * m)           # exp(-m |G|^2)
        gr = maxwell_rule(max(2, quad.n_semi // 2 + 1), 0.5 * m)   # g^2 exp(-m g^2/4)
        g = Rule(gr.nodes, gr.weights * np.exp(0.25 * m * gr.nodes ** 2))
        so = max(1, quad.sphere_order - 2)
        return cls(tensor(hG, hG, hG), g, sphere_rule(so), _laguerre(ne),
                   jacobi01_rule(nrr, 0.5 * d - 1.0, 0.5 * d - 1.0), jacobi01_rule(nrr, d - 1.0, 0.5),
                   sphere_rule(so))


def _weak_integrand(f: Field, gas: GasModel, model: ScatteringModel, rules: WeakRules, kernel):
    """Sum of weights * kernel(meas, FF, FFp, states) over the 9-d rule.

    ``kernel`` returns a pair of arrays whose leading axis indexes separate
    integrands; loops over centre-of-mass nodes, everything else is vectorized.
    """
    gv = (rules.g.nodes[:, None, None] * rules.ghat.nodes[None, :, :])         # (ng, nd, 3)
    wg = rules.g.weights[:, None] * rules.ghat.weights[None, :]                # (ng, nd)
    gv = gv[:, :, None, None, None, None, None, :]
    wg = wg[:, :, None, None, None, None, None]
    I = rules.I.nodes[None, None, :, None, None, None, None]
    Is = rules.I.nodes[None, None, None, :, None, None, None]
    r = rules.r.nodes[None, None, None, None, :, None, None]
    R = rules.R.nodes[None, None, None, None, None, :, None]
    om = rules.omega.nodes[None, None, None, None, None, None, :, :]
    W = (wg * rules.I.weights[None, None, :, None, None, None, None]
         * rules.I.weights[None, None, None, :, None, None, None]
         * rules.r.weights[None, None, None, None, :, None, None]
         * rules.R.weights[None, None, None, None, None, :, None]
         * rules.omega.weights[None, None, None, None, None, None, :])
    total = 0.0
    mag = 0.0
    for Gk, wG in zip(rules.G.nodes, rules.G.weights):
        xi = Gk + 0.5 * gv
        xs = Gk - 0.5 * gv
        meas, FF, FFp, (xp, xsp, Ip, Isp) = _collision_terms(f, xi, I, xs, Is, om, r, R, gas, model)
        val, absval = kernel(meas, FF, FFp, (xi, xs, I, Is, xp, xsp, Ip, Isp))
        total = total + wG * np.sum(W * val, axis=tuple(range(1, val.ndim)))
        mag = mag + wG * np.sum(W * absval, axis=tuple(range(1, absval.ndim)))
    return np.asarray(total, dtype=float), np.asarray(mag, dtype=float)


def _delta(psi: Field, states):
    xi, xs, I, Is, xp, xsp, Ip, Isp = states
    shape = np.broadcast_shapes(Ip.shape, xp.shape[:-1], np.shape(I))
    ev = lambda v, e: np.asarray(psi(np.broadcast_to(v, shape + (3,)), np.broadcast_to(e, shape)), dtype=float)
    a, b, c, d = ev(xi, I), ev(xs, Is), ev(xp, Ip), ev(xsp, Isp)
    return a + b - c - d, np.abs(a) + np.abs(b) + np.abs(c) + np.abs(d)


def weak_form_q_many(f: Field, psis, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec):
    """(values, magnitudes) of 1/4 int (F'F*' - FF*)(psi + psi* - psi' - psi*') dA
    for each test function in ``psis``.

    The magnitude integrates the absolute values of both factors termwise and
    sets the scale against which a vanishing value is judged.
    """
    rules = WeakRules.from_spec(quad, gas)

    def kernel(meas, FF, FFp, states):
        diff = 0.25 * meas * (FFp - FF)
        parts = [_delta(psi, states) for psi in psis]
        return (np.stack([diff * d for d, _ in parts]),
                np.stack([np.abs(diff) * a for _, a in parts]))

    return _weak_integrand(f, gas, model, rules, kernel)


def weak_form_q_detail(f: Field, psi: Field, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec):
    vals, mags = weak_form_q_many(f, [psi], gas, model, quad)
    return float(vals[0]), float(mags[0])


def weak_form_q(f: Field, g: Field, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> float:
    return weak_form_q_detail(f, g, gas, model, quad)[0]


def w_functional(f: Field, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> float:
    """Entropy production (Q(f,f), log(f / I^{delta/2-1})) in its symmetrized form
    -1/4 int (F'F*' - FF*) log(F'F*' / FF*) dA, nonpositive termwise."""
    rules = WeakRules.from_spec(quad, gas)

    def kernel(meas, FF, FFp, states):
        if np.any(FF <= 0) or np.any(FFp <= 0):
            raise CollisionOpError(f"{f.name} is not positive on the quadrature nodes")
        val = -0.25 * meas * (FFp - FF) * (np.log(FFp) - np.log(FF))
        return val[None], np.abs(val)[None]

    return float(_weak_integrand(f, gas, model, rules, kernel)[0][0])


def weak_diagnostics(f: Field, psis, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec):
    """Weak forms against ``psis`` and the entropy production W[f] from one pass
    over the quadrature; returns (values, magnitudes, W)."""
    rules = WeakRules.from_spec(quad, gas)

    def kernel(meas, FF, FFp, states):
        if np.any(FF <= 0) or np.any(FFp <= 0):
            raise CollisionOpError(f"{f.name} is not positive on the quadrature nodes")
        diff = 0.25 * meas * (FFp - FF)
        parts = [_delta(psi, states) for psi in psis]
        ent = -diff * (np.log(FFp) - np.log(FF))
        return (np.stack([diff * d for d, _ in parts] + [ent]),
                np.stack([np.abs(diff) * a for _, a in parts] + [np.abs(ent)]))

    vals, mags = _weak_integrand(f, gas, model, rules, kernel)
    return vals[:-1], mags[:-1], float(vals[-1])


def gamma_term(h: Field, p, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> float:
    """Quadratic remainder M^{-1/2} Q(M^{1/2} h, M^{1/2} h) at p, standard Maxwellian."""
    f = Field(lambda v, I: sqrt_maxwellian(gas, v, I) * h(v, I), f"M^1/2 {h.name}")
    mh = float(sqrt_maxwellian(gas, p.v, p.I))
    return q_eval(f, p, gas, model, quad) / mh


def gamma_inner_many(h: Field, phis, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec):
    """(Gamma(h, h), phi) for each phi through the weak form; returns (values, magnitudes)."""
    f = Field(lambda v, I: sqrt_maxwellian(gas, v, I) * h(v, I), f"M^1/2 {h.name}")
    psis = [Field(lambda v, I, phi=phi: phi(v, I) / sqrt_maxwellian(gas, v, I), f"{phi.name}/M^1/2")
            for phi in phis]
    return weak_form_q_many(f, psis, gas, model, quad)


def gamma_inner(h: Field, phi: Field, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec):
    vals, mags = gamma_inner_many(h, [phi], gas, model, quad)
    return float(vals[0]), float(mags[0])
