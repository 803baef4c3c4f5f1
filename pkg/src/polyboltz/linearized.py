"""Linearized operator L = nu - K with K = k2 - k1.

Two routes to the collision frequency nu are provided: the Borgnakke-Larsen
form integrated over (xi*, I*) and, for the power-law kernel family, a form
in the energies I', I*' of the post-collision pair.  k2 is computed in the
(chi, w, I') variables of the compiled kernel in ``_kernels``; the constant
in front of it is ``C0`` and is checked against a Monte-Carlo estimate of the
weak form (see ``calibrate_c0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import special

from . import _kernels
from .distributions import Field, sqrt_maxwellian
from .kinematics import GasModel, PhasePoint
from .models import ScatteringModel, kernel_value
from .quadrature import QuadratureSpec, Rule, interval_rule, jacobi01_rule, mc_reduce

C0 = 8.0
MIN_SEPARATION = 1e-8


class LinearizedError(ValueError):
    pass


def maxwell_norm(gas: GasModel) -> float:
    """Z with M = Z I^{delta/2-1} exp(-m|xi|^2/2 - I)."""
    return gas.m ** 1.5 / ((2.0 * math.pi) ** 1.5 * special.gamma(0.5 * gas.delta))


@dataclass(frozen=True)
class KernelArgs:
    x: PhasePoint
    y: PhasePoint

    @property
    def g(self) -> np.ndarray:
        return self.x.v - self.y.v

    @property
    def swapped(self) -> "KernelArgs":
        return KernelArgs(self.y, self.x)

    def invariants(self):
        """(|g|, G.n, |G_perp|) with G the mean velocity and n = g/|g|."""
        g = self.g
        gn = float(np.linalg.norm(g))
        if gn < MIN_SEPARATION:
            raise LinearizedError(f"kernel arguments too close, |xi - xi*| = {gn:.3g}")
        n = g / gn
        G = 0.5 * (self.x.v + self.y.v)
        cn = float(G @ n)
        an = float(np.linalg.norm(G - cn * n))
        return gn, cn, an


@dataclass(frozen=True)
class K2Internals:
    """Change of variables behind k2 for given (xi, xi*) and a plane point.

    The pair (xi', xi*') = (xi* + w - chi n, xi + w - chi n) has relative
    velocity -g; g_tilde = xi - xi' and g_star = xi* - xi*' are the relative
    velocities of the collision that swaps the roles of the two particles.
    """

    n: np.ndarray
    chi: float
    w: np.ndarray
    g_tilde: np.ndarray
    g_star: np.ndarray
    xi_p: np.ndarray
    xis_p: np.ndarray

    @classmethod
    def build(cls, args: KernelArgs, chi: float, w) -> "K2Internals":
        g = args.g
        n = g / np.linalg.norm(g)
        w = np.asarray(w, dtype=float)
        w = w - (w @ n) * n
        xp = args.y.v + w - chi * n
        xsp = args.x.v + w - chi * n
        return cls(n, float(chi), w, args.x.v - xp, args.y.v - xsp, xp, xsp)

    @classmethod
    def from_primed(cls, args: KernelArgs, xi_p) -> "K2Internals":
        n = args.g / np.linalg.norm(args.g)
        d = np.asarray(xi_p, dtype=float) - args.y.v
        chi = -float(d @ n)
        return cls.build(args, chi, d + chi * n)

    def delta_I_star(self, gas: GasModel, I, Is) -> float:
        """I* + I*' - I - I' forced by energy conservation of the swapped collision."""
        return gas.m * float(np.linalg.norm(self.g_tilde) ** 2 - np.linalg.norm(self.g_star) ** 2) / 4.0


# --- inner rules ---------------------------------------------------------------

@dataclass(frozen=True)
class InnerRules:
    """Rules for the inner integrals of k1, k2 and the angle average."""

    chi_x: np.ndarray
    chi_w: np.ndarray
    rho_u: np.ndarray
    rho_w: np.ndarray
    th_c: np.ndarray
    th_w: np.ndarray
    lag_x: np.ndarray
    lag_w: np.ndarray
    mu_x: np.ndarray
    mu_w: np.ndarray
    r: Rule
    R: Rule
    chi_half: float

    @classmethod
    def from_spec(cls, quad: QuadratureSpec, gas: GasModel) -> "InnerRules":
        return _inner_rules(quad.n_chi, quad.n_plane_radial, quad.n_plane_angular, quad.n_energy,
                            quad.n_mu, quad.n_rR, gas.m, gas.delta)

    def k2_args(self):
        return (self.chi_x, self.chi_w, self.rho_u, self.rho_w, self.th_c, self.th_w,
                self.lag_x, self.lag_w, self.chi_half)


@lru_cache(maxsize=32)
def _inner_rules(nchi, nrad, nang, nen, nmu, nrr, m, d):
    cx, cw = np.polynomial.legendre.leggauss(nchi)
    u, wu = special.roots_laguerre(nrad)       # u = m rho^2 / 2
    th = np.pi * (np.arange(nang) + 0.5) / nang  # half circle, the integrand is even in theta
    lx, lw = special.roots_laguerre(nen)
    gx, gw = np.polynomial.legendre.leggauss(nmu)
    return InnerRules(cx, cw, u, wu / m, np.cos(th), np.full(nang, 2.0 * np.pi / nang), lx, lw,
                      gx, gw, jacobi01_rule(nrr, 0.5 * d - 1.0, 0.5 * d - 1.0),
                      jacobi01_rule(nrr, d - 1.0, 0.5), 9.0 / math.sqrt(m))


def _model_args(model: ScatteringModel):
    return model.code, float(model.C), float(model.alpha), model.table_array()


def k2_prefactor(gas: GasModel, c0: float = C0) -> float:
    return 0.5 * c0 * gas.m ** 1.5 * maxwell_norm(gas)


# --- collision frequency ---------------------------------------------------------

def rR_integral(model: ScatteringModel, gas: GasModel, g2, I, Is, rules: InnerRules):
    """int B w(r, R) dr dR for angle-free B, vectorized over the pre-collision data."""
    g2, I, Is = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (g2, I, Is)))
    rw, Rw = rules.r.weights.sum(), rules.R.weights.sum()
    plain = replace(model, angular_table=())
    E = 0.25 * gas.m * g2 + I + Is
    if model.variant in ("PowerLawE", "GP20Model1"):
        B = kernel_value(plain, gas.m, E, g2, g2, I, Is, I, Is)
        return B * rw * Rw
    r = rules.r.nodes[:, None]
    R = rules.R.nodes[None, :]
    W = rules.r.weights[:, None] * rules.R.weights[None, :]
    out = np.empty(E.shape)
    flat = out.reshape(-1)
    for k, (e, gg, a, b) in enumerate(zip(E.ravel(), g2.ravel(), I.ravel(), Is.ravel())):
        Ip = r * (1.0 - R) * e
        Isp = (1.0 - r) * (1.0 - R) * e
        B = kernel_value(plain, gas.m, e, gg, 4.0 * R * e / gas.m, a, b, Ip, Isp)
        flat[k] = np.sum(W * B)
    return out


@lru_cache(maxsize=16)
def _nu_rules(n_interval, n_semi, n_mu, m, d):
    ns = 4 * n_interval
    s, ws = np.polynomial.legendre.leggauss(ns)
    top = 9.0 / math.sqrt(m)
    s = 0.5 * top * (s + 1.0)
    ws = 0.5 * top * ws
    mu, wmu = np.polynomial.legendre.leggauss(2 * n_mu)
    x, wx = special.roots_genlaguerre(2 * n_semi, 0.5 * d - 1.0)
    return s, ws, mu, wmu, x, wx


def nu_general(p: PhasePoint, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> float:
    return float(nu_general_many(np.array([p.speed]), np.array([p.I]), gas, model, quad)[0])


def nu_general_many(s, I, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> np.ndarray:
    """nu = int M* B w(r, R) domega dr dR dxi* dI* at speeds s and energies I.

    The omega integral is 4 pi times the mean angular factor, the xi* integral
    is taken in (|xi*|, cosine to xi) and I* with a generalized Laguerre rule.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    I = np.atleast_1d(np.asarray(I, dtype=float))
    m, d = gas.m, gas.delta
    ss, ws, mu, wmu, x, wx = _nu_rules(quad.n_interval, quad.n_semi, quad.n_mu, m, d)
    rules = InnerRules.from_spec(quad, gas)
    Z = maxwell_norm(gas)
    S, MU, IS = np.meshgrid(ss, mu, x, indexing="ij")
    W = (2.0 * math.pi * (ws * ss * ss)[:, None, None] * wmu[None, :, None] * wx[None, None, :]
         * Z * np.exp(-0.5 * m * S * S))
    ang = 4.0 * math.pi * model.angular_mean()
    out = np.empty(len(s))
    for k, (sk, Ik) in enumerate(zip(s, I)):
        g2 = sk * sk + S * S - 2.0 * sk * S * MU
        g2 = np.maximum(g2, 0.0)
        out[k] = ang * np.sum(W * rR_integral(model, gas, g2, Ik, IS, rules))
    return out


@lru_cache(maxsize=16)
def _reduced_rules(n_interval, n_semi, n_rR, d):
    ng = 4 * n_interval
    gx, gw = np.polynomial.legendre.leggauss(ng)
    x, wx = special.roots_genlaguerre(2 * n_semi, 0.5 * d - 1.0)
    u = jacobi01_rule(n_rR, 0.5, d - 1.0)                # u^{d-1} (1-u)^{1/2}
    t = jacobi01_rule(n_rR, 0.5 * d - 1.0, 0.5 * d - 1.0)
    return gx, gw, x, wx, u, t


def nu_reduced_e1(p: PhasePoint, gas: GasModel, alpha: float, C: float, quad: QuadratureSpec) -> float:
    """Collision frequency of the power-law family from the energy form

        nu = 4 pi C Z int e^{-I*} e^{-m|xi*|^2/2} (I* I' I*')^{d/2-1}
             sqrt(E - I' - I*') / E^{d + (alpha-1)/2} dxi* dI* dI' dI*'

    over I' + I*' < E.  The xi* integral is reduced to one in |g| = |xi - xi*|
    and the pair (I', I*') is written as (u E, t) with Gauss-Jacobi rules.
    """
    if not 0.0 <= alpha <= 2.0:
        raise LinearizedError(f"alpha must lie in [0, 2], got {alpha}")
    m, d = gas.m, gas.delta
    gx, gw, x, wx, ur, tr = _reduced_rules(quad.n_interval, quad.n_semi, quad.n_rR, d)
    s = p.speed
    width = 9.0 / math.sqrt(m)
    lo, hi = max(0.0, s - width), s + width
    g = 0.5 * (hi - lo) * gx + 0.5 * (hi + lo)
    wg = 0.5 * (hi - lo) * gw
    # angular average of exp(-m |xi - g|^2 / 2) over directions of g, times 4 pi g^2
    a = 2.0 * m * s * g
    if s > 0:
        ang = np.exp(-0.5 * m * (g - s) ** 2) * np.where(a > 1e-12, -np.expm1(-a) / np.where(a > 0, a, 1.0), 1.0)
    else:
        ang = np.exp(-0.5 * m * g * g)
    ang = 4.0 * math.pi * g * g * ang
    G, IS = np.meshgrid(g, x, indexing="ij")
    E = 0.25 * m * G * G + p.I + IS
    # I' = t u E, I*' = (1-t) u E, dI' dI*' = u E^2 du dt.  Then
    # (I'I*')^{d/2-1} sqrt(E - I' - I*') dI' dI*' = E^{d+1/2} u^{d-1} (1-u)^{1/2} (t(1-t))^{d/2-1} du dt,
    # and the u, t weights are carried by the Jacobi rules.
    ut = np.sum(ur.weights[:, None] * tr.weights[None, :])
    inner = E ** (d + 0.5) * ut / E ** (d + 0.5 * (alpha - 1.0))
    total = np.sum((wg * ang)[:, None] * wx[None, :] * inner)
    Z = maxwell_norm(gas)
    return float(4.0 * math.pi * C * Z * total)


# --- kernels ------------------------------------------------------------------

def k1_eval(args: KernelArgs, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec) -> float:
    """k1 = (M M*)^{1/2} int B w(r, R) domega dr dR.

    The omega integral is analytic because the Maxwellian factors of the
    post-collision pair only see G and |g'|.
    """
    gn, _, _ = args.invariants()
    rules = InnerRules.from_spec(quad, gas)
    Mh = sqrt_maxwellian(gas, args.x.v, args.x.I) * sqrt_maxwellian(gas, args.y.v, args.y.I)
    val = rR_integral(model, gas, gn * gn, args.x.I, args.y.I, rules)
    return float(Mh * 4.0 * math.pi * model.angular_mean() * val)


def k1_values(x, Ix, y, Iy, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec):
    """k1 on broadcast arrays of velocities (..., 3) and energies."""
    rules = InnerRules.from_spec(quad, gas)
    g = np.asarray(x) - np.asarray(y)
    g2 = np.sum(g * g, axis=-1)
    Mh = sqrt_maxwellian(gas, x, Ix) * sqrt_maxwellian(gas, y, Iy)
    return Mh * 4.0 * math.pi * model.angular_mean() * rR_integral(model, gas, g2, Ix, Iy, rules)


def k2_eval(args: KernelArgs, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec,
            c0: float = C0) -> float:
    gn, cn, an = args.invariants()
    rules = InnerRules.from_spec(quad, gas)
    code, c, alpha, btab = _model_args(model)
    Ia, Ib = args.x.I, args.y.I
    core = _kernels.k2_core(gn, cn, an, Ia, Ib, gas.m, gas.delta, code, c, alpha, btab, *rules.k2_args())
    return float(k2_prefactor(gas, c0) * (Ia * Ib) ** (0.25 * gas.delta - 0.5) * core)


def k2_values(gn, cn, an, Ia, Ib, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec,
              c0: float = C0) -> np.ndarray:
    """k2 from rotation invariants (|g|, G.n, |G_perp|) on 1-d arrays."""
    arrs = [np.ascontiguousarray(np.broadcast_to(np.asarray(a, dtype=float), np.broadcast_shapes(
        *(np.shape(b) for b in (gn, cn, an, Ia, Ib))))).ravel() for a in (gn, cn, an, Ia, Ib)]
    rules = InnerRules.from_spec(quad, gas)
    code, c, alpha, btab = _model_args(model)
    out = np.empty(arrs[0].shape[0])
    _kernels.k2_batch(*arrs, gas.m, gas.delta, code, c, alpha, btab, *rules.k2_args(), out)
    return k2_prefactor(gas, c0) * (arrs[3] * arrs[4]) ** (0.25 * gas.delta - 0.5) * out


def k_eval(args: KernelArgs, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec,
           c0: float = C0) -> float:
    return k2_eval(args, gas, model, quad, c0) - k1_eval(args, gas, model, quad)


# --- weak form oracle -------------------------------------------------------------

def weak_L_mc(h: Field, g: Field, gas: GasModel, model: ScatteringModel, n: int, seed: int,
              workers: int = 1):
    """Monte-Carlo estimate of (Lh, g) = 1/4 int M M* B w(r, R) dH dPsi.

    Here dH = H + H* - H' - H*' with H = h / M^{1/2}, likewise dPsi for g.
    (xi, I) and (xi*, I*) are drawn from the standard Maxwellian, (r, R) and
    omega uniformly, so each sample contributes pi B w dH dPsi.
    Returns (estimate, stderr).
    """
    m, d = gas.m, gas.delta
    if n < 2:
        raise LinearizedError("need at least two samples")

    def ratio(f, v, I):
        return np.asarray(f(v, I), dtype=float) / sqrt_maxwellian(gas, v, I)

    def fn(rng, k):
        xi = rng.standard_normal((k, 3)) / math.sqrt(m)
        xs = rng.standard_normal((k, 3)) / math.sqrt(m)
        I = rng.gamma(0.5 * d, size=k)
        Is = rng.gamma(0.5 * d, size=k)
        r = rng.random(k)
        R = rng.random(k)
        om = rng.standard_normal((k, 3))
        om /= np.linalg.norm(om, axis=-1, keepdims=True)
        if np.any(I <= 0) or np.any(Is <= 0) or np.any(R <= 0) or np.any(R >= 1):
            raise LinearizedError("sampler produced a point outside the open domain")
        rel = xi - xs
        g2 = np.sum(rel * rel, axis=-1)
        E = 0.25 * m * g2 + I + Is
        G = 0.5 * (xi + xs)
        gp = np.sqrt(4.0 * R * E / m)
        Ip = r * (1.0 - R) * E
        Isp = (1.0 - r) * (1.0 - R) * E
        xp = G + 0.5 * gp[:, None] * om
        xsp = G - 0.5 * gp[:, None] * om
        cos = None
        if model.angular_table:
            cos = np.abs(np.sum(rel * om, axis=-1)) / np.sqrt(g2)
        B = kernel_value(model, m, E, g2, gp * gp, I, Is, Ip, Isp, cos)
        w = (r * (1.0 - r)) ** (0.5 * d - 1.0) * (1.0 - R) ** (d - 1.0) * np.sqrt(R)
        dH = ratio(h, xi, I) + ratio(h, xs, Is) - ratio(h, xp, Ip) - ratio(h, xsp, Isp)
        dG = ratio(g, xi, I) + ratio(g, xs, Is) - ratio(g, xp, Ip) - ratio(g, xsp, Isp)
        return math.pi * B * w * dH * dG

    return mc_reduce(fn, n, seed, workers)


def calibration_field(gas: GasModel) -> Field:
    """(m|xi|^2 - 3) M^{1/2}: isotropic, orthogonal to M^{1/2} and not in ker L."""
    return Field(lambda v, I: (gas.m * np.sum(v * v, axis=-1) - 3.0) * sqrt_maxwellian(gas, v, I),
                 "calibration", True, True)


def calibrate_c0(op, h: Field, gas: GasModel, model: ScatteringModel, n: int, seed: int,
                 c0_used: float = C0):
    """Value of c0 for which the matrix form of (h, Lh) equals the MC oracle.

    ``op`` must expose ``quadratic_parts(h)`` returning (nu, K1, K2) pieces of
    (h, Lh) assembled with c0 = ``c0_used``.  Returns (c0, stderr).
    """
    est, err = weak_L_mc(h, h, gas, model, n, seed)
    nu_part, k1_part, k2_part = op.quadratic_parts(h)
    if k2_part == 0:
        raise LinearizedError("k2 contribution vanishes, c0 is not identifiable")
    c0 = c0_used * (nu_part + k1_part - est) / k2_part
    return float(c0), float(c0_used * err / abs(k2_part))


# --- envelopes and probes -------------------------------------------------------------

def envelope_base(s, I):
    return 1.0 + np.asarray(s, dtype=float) + np.sqrt(np.asarray(I, dtype=float))


def nu_envelope_ratios(p: PhasePoint, gas: GasModel, alpha: float, epsilon: float, nu_value: float):
    if not nu_value > 0:
        raise LinearizedError(f"collision frequency must be positive, got {nu_value}")
    if not epsilon > 0:
        raise LinearizedError(f"epsilon must be positive, got {epsilon}")
    b = float(envelope_base(p.speed, p.I))
    return nu_value / b ** (2.0 - alpha), nu_value / b ** (2.0 - alpha + epsilon)


@dataclass
class EnvelopeScan:
    s: np.ndarray
    I: np.ndarray
    nu: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def min_lower(self) -> float:
        return float(self.lower.min())

    @property
    def max_upper(self) -> float:
        return float(self.upper.max())


def envelope_scan(gas: GasModel, model: ScatteringModel, quad: QuadratureSpec, epsilon: float = 0.1,
                  s_max: float = 10.0, I_max: float = 25.0, n_s: int = 11, n_I: int = 11) -> EnvelopeScan:
    s = np.linspace(0.0, s_max, n_s)
    I = np.linspace(0.0, I_max, n_I)
    I[0] = 1e-6 * max(I_max, 1.0)   # I = 0 itself is not a phase point
    S, II = np.meshgrid(s, I, indexing="ij")
    nu = nu_general_many(S.ravel(), II.ravel(), gas, model, quad).reshape(S.shape)
    base = envelope_base(S, II)
    a = model.alpha
    return EnvelopeScan(S, II, nu, nu / base ** (2.0 - a), nu / base ** (2.0 - a + epsilon))


def k1_hs_norm(gas: GasModel, model: ScatteringModel, quad: QuadratureSpec, box_scale: float = 1.0,
               n: int = 16) -> float:
    """Quadrature value of int int k1^2 over |xi|, |xi*| <= v_max and I, I* <= I_max (scaled)."""
    vmax = quad.v_max * box_scale
    Imax = quad.I_max * box_scale
    rules = InnerRules.from_spec(quad, gas)
    sr = interval_rule(n, 0.0, vmax)
    mr = interval_rule(n, -1.0, 1.0)
    edges = np.array([0.0, 2.0, 6.0, Imax])
    parts = [interval_rule(n // 2, a, b) for a, b in zip(edges[:-1], edges[1:])]
    Ix = np.concatenate([q.nodes for q in parts])
    Iw = np.concatenate([q.weights for q in parts])
    m = gas.m
    S1, S2, MU, I1, I2 = np.meshgrid(sr.nodes, sr.nodes, mr.nodes, Ix, Ix, indexing="ij", sparse=True)
    W = (4.0 * math.pi * (sr.weights * sr.nodes ** 2)[:, None, None, None, None]
         * (2.0 * math.pi * sr.weights * sr.nodes ** 2)[None, :, None, None, None]
         * mr.weights[None, None, :, None, None] * Iw[None, None, None, :, None] * Iw[None, None, None, None, :])
    g2 = np.maximum(S1 * S1 + S2 * S2 - 2.0 * S1 * S2 * MU, 0.0)
    Z = maxwell_norm(gas)
    p = 0.5 * gas.delta - 1.0
    MM = Z * Z * (I1 * I2) ** p * np.exp(-0.5 * m * (S1 * S1 + S2 * S2) - I1 - I2)
    k1 = 4.0 * math.pi * model.angular_mean() * rR_integral(model, gas, g2, I1, I2, rules)
    return float(np.sum(W * MM * k1 * k1))
