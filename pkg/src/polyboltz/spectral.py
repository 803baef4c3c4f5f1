"""Nystrom discretization of K and the spectral checks on L = nu - K.

Two grids are supported.  The isotropic grid has nodes (s, I) with s = |xi|
and carries the angle-averaged kernel; it represents the rotation invariant
subspace, where ker L is spanned by M^{1/2} and (m|xi|^2 + 2I) M^{1/2}.  The
full grid is a tensor grid in (xi, I) and sees all five null functions.

Matrices are stored unsymmetrized, Kmat[i, j] = k(node_i, node_j) w_j, and
symmetrized by the similarity D^{1/2} (.) D^{-1/2}, D = diag(w).
"""

from __future__ import annotations

import hashlib
import math
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import linalg, special

from . import _kernels
from .distributions import sqrt_maxwellian
from .kinematics import GasModel
from .linearized import C0, InnerRules, _model_args, k2_prefactor, nu_general_many, rR_integral
from .models import ScatteringModel
from .quadrature import QuadratureSpec, sphere_rule

ISOTROPIC, FULL = "isotropic", "full"
MODE_CODES = {ISOTROPIC: 0, FULL: 1}
BLOP_MAGIC = b"BLOP"
BLOP_VERSION = 1
SYMMETRY_HARD_LIMIT = 1e-6


class SpectralError(ValueError):
    pass


# --- grids ------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Quadrature nodes and weights.

    isotropic: nodes (s, I), weight 4 pi s^2 ds dI.
    full:      nodes (vx, vy, vz, I), weight dxi dI.
    """

    mode: str
    nodes: np.ndarray
    weights: np.ndarray
    dims: tuple

    def __post_init__(self):
        if self.mode not in MODE_CODES:
            raise SpectralError(f"unknown grid mode {self.mode!r}")
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        w = np.ascontiguousarray(self.weights, dtype=float)
        want = 2 if self.mode == ISOTROPIC else 4
        if nodes.ndim != 2 or nodes.shape[1] != want or w.shape != (nodes.shape[0],):
            raise SpectralError(f"{self.mode} grid needs nodes of shape (N, {want}) and N weights")
        if int(np.prod(self.dims)) != nodes.shape[0]:
            raise SpectralError(f"grid dims {self.dims} do not match {nodes.shape[0]} nodes")
        if not np.all(w > 0):
            raise SpectralError("grid weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def energies(self) -> np.ndarray:
        return self.nodes[:, -1]

    @property
    def velocities(self) -> np.ndarray:
        if self.mode == ISOTROPIC:
            return np.stack([np.zeros(len(self)), np.zeros(len(self)), self.nodes[:, 0]], axis=-1)
        return self.nodes[:, :3]

    @property
    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.velocities, axis=-1)

    def spacing(self) -> float:
        """Smallest distance between two distinct nodes."""
        x = self.nodes
        d = np.sqrt(np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=-1))
        d[np.diag_indices_from(d)] = np.inf
        return float(d.min())


def isotropic_grid(ns: int, nI: int, gas: GasModel) -> Grid:
    """Gauss nodes adapted to the Maxwellian in speed and energy.

    Speeds come from the rule for int s^2 e^{-m s^2/2} ds, energies from
    Gauss-Laguerre; the weights are divided by the weight functions so the
    grid integrates plain functions against 4 pi s^2 ds dI.
    """
    if ns < 1 or nI < 1:
        raise SpectralError("grid needs at least one node per direction")
    m = gas.m
    t, w = special.roots_genlaguerre(ns, 0.5)
    s = np.sqrt(2.0 * t / m)
    ws = w * np.exp(t) * (2.0 / m) ** 1.5 / 2.0      # weight for f(s) s^2 ds
    x, wx = special.roots_laguerre(nI)
    wI = wx * np.exp(x)
    S = np.repeat(s, nI)
    I = np.tile(x, ns)
    W = 4.0 * math.pi * np.repeat(ws, nI) * np.tile(wI, ns)
    return Grid(ISOTROPIC, np.stack([S, I], axis=-1), W, (ns, nI))


def sphere_order_for(nd: int) -> int:
    """Order of the product sphere rule with ``nd`` directions."""
    for order in range(1, 64):
        if len(sphere_rule(order)) == nd:
            return order
    raise SpectralError(f"no sphere rule has {nd} directions")


def full_grid(ns: int, nI: int, gas: GasModel, sphere_order: int = 5) -> Grid:
    """Nodes s_i omega_a with the isotropic (s, I) nodes and a product sphere rule.

    Node order is (speed, direction, energy).
    """
    iso = isotropic_grid(ns, nI, gas)
    sph = sphere_rule(sphere_order)
    nd = len(sph)
    s = iso.nodes[:, 0].reshape(ns, nI)[:, 0]
    I = iso.nodes[:, 1].reshape(ns, nI)[0]
    wr = iso.weights.reshape(ns, nI) / (4.0 * math.pi)
    V = s[:, None, None, None] * sph.nodes[None, :, None, :] * np.ones((1, 1, nI, 1))
    II = np.broadcast_to(I[None, None, :], (ns, nd, nI))
    nodes = np.concatenate([V, II[..., None]], axis=-1).reshape(-1, 4)
    W = wr[:, None, :] * sph.weights[None, :, None]
    return Grid(FULL, nodes, W.ravel(), (ns, nd, nI))


def _full_structure(grid: Grid):
    """Radial grid, directions, direction weights and the angular cutoff of a full grid."""
    ns, nd, nI = grid.dims
    X = grid.nodes.reshape(ns, nd, nI, 4)
    s = np.linalg.norm(X[:, 0, 0, :3], axis=-1)
    om = X[0, :, 0, :3] / s[0]
    I = X[0, 0, :, 3]
    W = grid.weights.reshape(ns, nd, nI)
    wdir = 4.0 * math.pi * W[0, :, 0] / W[0, :, 0].sum()
    wrad = W.sum(axis=1)                    # 4 pi s^2 ds dI
    radial = Grid(ISOTROPIC, np.stack([np.repeat(s, nI), np.tile(I, ns)], -1), wrad.ravel(), (ns, nI))
    order = sphere_order_for(nd)
    return radial, om, wdir, order // 2


def make_grid(mode: str, dims, gas: GasModel) -> Grid:
    if mode == ISOTROPIC:
        return isotropic_grid(int(dims[0]), int(dims[1]), gas)
    if mode == FULL:
        order = sphere_order_for(int(dims[1])) if len(dims) == 3 else 5
        return full_grid(int(dims[0]), int(dims[-1]), gas, order)
    raise SpectralError(f"unknown grid mode {mode!r}")


DEFAULT_DIMS = {ISOTROPIC: (12, 10), FULL: (7, 18, 6)}


# --- operator ----------------------------------------------------------------------

@dataclass
class NystromOperator:
    grid: Grid
    Kmat: np.ndarray
    nu: np.ndarray
    meta: dict = field(default_factory=dict)
    k1: np.ndarray | None = None      # unweighted kernel values, kept when assembled
    k2: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.grid)
        self.Kmat = np.asarray(self.Kmat, dtype=float)
        self.nu = np.asarray(self.nu, dtype=float)
        if self.Kmat.shape != (n, n) or self.nu.shape != (n,):
            raise SpectralError(f"operator dimensions do not match the {n}-node grid")
        if not np.all(self.nu > 0):
            raise SpectralError("collision frequency must be positive on every node")

    @property
    def mode(self) -> str:
        return self.grid.mode

    def kernel_values(self) -> np.ndarray:
        return self.Kmat / self.grid.weights[None, :]

    def scaled(self, c: float) -> "NystromOperator":
        return NystromOperator(self.grid, c * self.Kmat, c * self.nu, dict(self.meta),
                               None if self.k1 is None else c * self.k1,
                               None if self.k2 is None else c * self.k2)

    def sample(self, f) -> np.ndarray:
        """Values of a Field on the nodes."""
        V = self.grid.velocities
        return np.asarray(f(V, self.grid.energies), dtype=float)

    def quadratic_form(self, h) -> float:
        """(h, L h) with h a Field or a node vector."""
        v = h if isinstance(h, np.ndarray) else self.sample(h)
        w = self.grid.weights
        return float(np.sum(w * v * (self.nu * v - self.Kmat @ v)))

    def quadratic_parts(self, h):
        """(h, nu h), (h, K1 h), (h, K2 h) for the stored kernel parts."""
        if self.k1 is None or self.k2 is None:
            raise SpectralError("kernel parts were not kept for this operator")
        v = h if isinstance(h, np.ndarray) else self.sample(h)
        w = self.grid.weights
        wv = w * v
        return float(np.sum(wv * self.nu * v)), float(wv @ self.k1 @ wv), float(wv @ self.k2 @ wv)

    def checksum(self) -> str:
        hsh = hashlib.sha256()
        for a in (self.grid.nodes, self.grid.weights, self.nu, self.Kmat):
            hsh.update(np.ascontiguousarray(a, dtype="<f8").tobytes())
        return hsh.hexdigest()


def _radial_k2(grid: Grid, gas: GasModel, model: ScatteringModel, rules: InnerRules, workers: int,
               c0: float, lmax: int = 0):
    """Legendre moments 1/2 int k2 P_l dmu between the (s, I) nodes, shape (n, n, lmax + 1)."""
    S, I = grid.nodes[:, 0].copy(), grid.nodes[:, 1].copy()
    n = len(grid)
    code, c, alpha, btab = _model_args(model)
    out = np.zeros((n, n, lmax + 1))
    pref = k2_prefactor(gas, c0)
    nchunk = max(1, min(n, 4 * workers))
    # interleaved rows balance the upper-triangle work between chunks
    chunks = [np.arange(k, n, nchunk) for k in range(nchunk)]

    def one(rows):
        part = np.zeros((len(rows), n, lmax + 1))
        _kernels.iso_k2_rows(rows, S, I, gas.m, gas.delta, code, c, alpha, btab, rules.mu_x, rules.mu_w,
                             *rules.k2_args(), pref, part)
        return rows, part

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(one, chunks))
    else:
        results = [one(ch) for ch in chunks]
    for rows, part in results:
        out[rows] = part
    up = np.triu(np.ones((n, n), dtype=bool))
    return np.where(up[..., None], out, out.transpose(1, 0, 2))


def _radial_k1(grid: Grid, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec, rules: InnerRules,
               lmax: int = 0):
    """Legendre moments 1/2 int k1 P_l dmu, integrated in |g| with dmu = g dg / (s s*)."""
    S, I = grid.nodes[:, 0], grid.nodes[:, 1]
    gx, gw = np.polynomial.legendre.leggauss(2 * quad.n_mu)
    lo = np.abs(S[:, None] - S[None, :])
    hi = S[:, None] + S[None, :]
    half = 0.5 * (hi - lo)
    g = half[..., None] * gx + (0.5 * (hi + lo))[..., None]
    val = rR_integral(model, gas, g * g, I[:, None, None], I[None, :, None], rules)
    mu = (S[:, None, None] ** 2 + S[None, :, None] ** 2 - g * g) / (2.0 * S[:, None, None] * S[None, :, None])
    Mh = sqrt_maxwellian(gas, grid.velocities, I)
    pre = Mh[:, None] * Mh[None, :] * 4.0 * math.pi * model.angular_mean() / (2.0 * S[:, None] * S[None, :])
    out = np.empty((len(S), len(S), lmax + 1))
    for l in range(lmax + 1):
        Pl = special.eval_legendre(l, mu)
        out[..., l] = pre * np.sum(half[..., None] * gw * g * val * Pl, axis=-1)
    return out


def _expand_angles(moments: np.ndarray, grid: Grid, om: np.ndarray) -> np.ndarray:
    """Full-grid kernel sum_l (2l+1) kbar_l(i, j) P_l(omega_a . omega_b), node order (s, dir, I)."""
    ns, nd, nI = grid.dims
    lmax = moments.shape[-1] - 1
    c = np.clip(om @ om.T, -1.0, 1.0)
    P = np.stack([(2 * l + 1) * special.eval_legendre(l, c) for l in range(lmax + 1)], axis=-1)   # (nd, nd, L)
    mom = moments.reshape(ns, nI, ns, nI, lmax + 1)
    full = np.einsum("ikjql,abl->iakjbq", mom, P)
    return full.reshape(ns * nd * nI, ns * nd * nI)


def assemble(grid: Grid, gas: GasModel, model: ScatteringModel, quad: QuadratureSpec,
             workers: int = 1, kernel: Callable | None = None, nu: Callable | None = None,
             c0: float = C0) -> NystromOperator:
    """Nystrom matrix Kmat[i, j] = k(node_i, node_j) w_j and nu on the nodes.

    ``kernel(x, y)`` and ``nu(x)`` replace the physical kernel and frequency
    (node coordinates as arguments); they exist for checking the assembly
    bookkeeping on small examples.
    """
    if grid.spacing() <= 0.0:
        raise SpectralError("grid has coincident nodes")
    t0 = time.perf_counter()
    n = len(grid)
    meta = {"mode": grid.mode, "dims": list(grid.dims), "model": model.variant, "C": model.C,
            "alpha": model.alpha, "m": gas.m, "delta": gas.delta, "c0": c0}
    k1 = k2 = None
    if kernel is not None:
        kv = np.array([[kernel(a, b) for b in grid.nodes] for a in grid.nodes], dtype=float)
        nuv = np.array([nu(a) for a in grid.nodes], dtype=float) if nu is not None else np.ones(n)
        meta["pairs"] = n * n
    else:
        if grid.mode == ISOTROPIC and not model.isotropic:
            raise SpectralError("isotropic mode needs an angle-independent kernel")
        rules = InnerRules.from_spec(quad, gas)
        if grid.mode == ISOTROPIC:
            k2 = _radial_k2(grid, gas, model, rules, workers, c0)[..., 0]
            k1 = _radial_k1(grid, gas, model, quad, rules)[..., 0]
            meta["pairs"] = n * (n + 1) // 2
        else:
            radial, om, _, lmax = _full_structure(grid)
            k2 = _expand_angles(_radial_k2(radial, gas, model, rules, workers, c0, lmax), grid, om)
            k1 = _expand_angles(_radial_k1(radial, gas, model, quad, rules, lmax), grid, om)
            meta["pairs"] = len(radial) * (len(radial) + 1) // 2
            meta["lmax"] = lmax
        kv = k2 - k1
        sp = grid.speeds
        key, idx = np.unique(np.round(np.stack([sp, grid.energies], -1), 12), axis=0, return_inverse=True)
        nuv = nu_general_many(key[:, 0], key[:, 1], gas, model, quad)[idx.ravel()]
    meta["seconds"] = time.perf_counter() - t0
    return NystromOperator(grid, kv * grid.weights[None, :], nuv, meta, k1, k2)


# --- linear algebra --------------------------------------------------------------------

@dataclass
class SymmetrizedL:
    matrix: np.ndarray
    correction: float      # relative size of the antisymmetric part that was averaged away


def symmetrized_L(op: NystromOperator) -> SymmetrizedL:
    """D^{1/2} (diag(nu) - Kmat) D^{-1/2}, averaged with its transpose."""
    d = np.sqrt(op.grid.weights)
    A = np.diag(op.nu) - d[:, None] * op.Kmat / d[None, :]
    scale = float(np.abs(A).max())
    corr = float(np.abs(A - A.T).max()) / scale if scale > 0 else 0.0
    if corr > SYMMETRY_HARD_LIMIT:
        raise SpectralError(f"discretized L is not symmetric: relative asymmetry {corr:.3g}")
    return SymmetrizedL(0.5 * (A + A.T), corr)


def symmetrized_K(op: NystromOperator) -> np.ndarray:
    d = np.sqrt(op.grid.weights)
    A = d[:, None] * op.Kmat / d[None, :]
    return 0.5 * (A + A.T)


def eigendecompose(mat, tol: float = 1e-12):
    """Eigenvalues in descending order and orthonormal eigenvectors (columns)."""
    A = np.asarray(mat, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SpectralError("need a square matrix")
    scale = max(float(np.abs(A).max()), 1e-300)
    if float(np.abs(A - A.T).max()) > tol * scale:
        raise SpectralError("matrix is not symmetric")
    w, V = linalg.eigh(0.5 * (A + A.T))
    return w[::-1], V[:, ::-1]


def null_functions(grid: Grid, gas: GasModel) -> dict:
    """Basis of ker L sampled on the nodes (two functions on isotropic grids)."""
    V, I = grid.velocities, grid.energies
    Mh = sqrt_maxwellian(gas, V, I)
    out = {"mass": Mh}
    if grid.mode == FULL:
        for k, name in enumerate(("px", "py", "pz")):
            out[name] = V[:, k] * Mh
    out["energy"] = (gas.m * np.sum(V * V, axis=-1) + 2.0 * I) * Mh
    return out


def nullspace_residuals(op: NystromOperator, gas: GasModel, L: np.ndarray | None = None) -> dict:
    """||L phi|| / (||L|| ||phi||) for each null function, in the weighted norm."""
    L = symmetrized_L(op).matrix if L is None else L
    norm = float(np.abs(linalg.eigvalsh(L)).max())
    d = np.sqrt(op.grid.weights)
    out = {}
    for name, phi in null_functions(op.grid, gas).items():
        v = d * phi
        out[name] = float(np.linalg.norm(L @ v) / (norm * np.linalg.norm(v)))
    return out


def null_dimension(op: NystromOperator) -> int:
    return 2 if op.mode == ISOTROPIC else 5


@dataclass
class Coercivity:
    lam: float
    null_vectors: np.ndarray      # columns, in the symmetrized coordinates
    complement: np.ndarray        # orthonormal basis of their complement
    eigenvalues: np.ndarray       # of L, ascending


def coercivity_estimate(op: NystromOperator, L: np.ndarray | None = None) -> Coercivity:
    """Smallest generalized eigenvalue of (L, diag nu) on the complement of the
    numerical null space (the eigenvectors of the smallest eigenvalues of L)."""
    L = symmetrized_L(op).matrix if L is None else L
    k = null_dimension(op)
    w, V = linalg.eigh(L)
    N = V[:, :k]
    Q = V[:, k:]
    A = Q.T @ L @ Q
    B = Q.T @ (op.nu[:, None] * Q)
    lam = float(linalg.eigh(0.5 * (A + A.T), 0.5 * (B + B.T), eigvals_only=True)[0])
    return Coercivity(lam, N, Q, w)


@dataclass
class SVDReport:
    values: np.ndarray
    ratios: dict

    @property
    def non_increasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0.0))


def svd_decay(op: NystromOperator) -> SVDReport:
    sv = linalg.svdvals(symmetrized_K(op))
    sv = np.sort(sv)[::-1]
    n = len(sv)
    ratios = {}
    for label, k in (("quarter", n // 4), ("half", n // 2), ("full", n)):
        k = max(1, k)
        ratios[label] = float(sv[k - 1] / sv[0])
    return SVDReport(sv, ratios)


# --- truncation probe ----------------------------------------------------------------

@dataclass
class LGDProbe:
    N: np.ndarray
    sup: np.ndarray
    fit_C: float          # least-squares C in sup ~ C (1/N^2 + 1/N)
    fit_c1: float         # smallest c with sup <= c / N on the probed range

    @property
    def non_increasing(self) -> bool:
        return bool(np.all(np.diff(self.sup) <= 0.0))


def lgd_truncation_probe(gas: GasModel, model: ScatteringModel, quad: QuadratureSpec, N_list=(2, 4, 8, 16),
                         probe_s=(0.0, 0.75, 1.5), probe_I=(0.5, 1.5), c0: float = C0) -> LGDProbe:
    """sup over probe points of int k2 (1 - 1_{h_N}) dxi* dI*, with
    h_N = {|xi - xi*| >= 1/N, |xi| <= N}.

    For probe points with |xi| <= N the complement of h_N is the ball
    |xi - xi*| < 1/N; otherwise it is everything, and the integral is the
    full int k2 dxi* dI*.
    """
    N_list = np.asarray(N_list, dtype=float)
    if np.any(np.diff(N_list) <= 0):
        raise SpectralError("N_list must be increasing")
    rules = InnerRules.from_spec(quad, gas)
    code, c, alpha, btab = _model_args(model)
    m, d = gas.m, gas.delta
    gx, gw = np.polynomial.legendre.leggauss(quad.n_interval)
    sph = sphere_rule(quad.sphere_order)
    ix, iw = special.roots_laguerre(quad.n_energy)
    iw = iw * np.exp(ix)
    pref = k2_prefactor(gas, c0)
    sups = []
    for N in N_list:
        best = 0.0
        for s in probe_s:
            xi = np.array([0.0, 0.0, s])
            for I in probe_I:
                if s > N:
                    lo, hi = 0.0, s + 9.0 / math.sqrt(m)
                else:
                    lo, hi = 0.0, 1.0 / N
                g = 0.5 * (hi - lo) * (gx + 1.0) + lo
                wg = 0.5 * (hi - lo) * gw * g * g
                total = 0.0
                for gk, wk in zip(g, wg):
                    for om, wo in zip(sph.nodes, sph.weights):
                        # xi* = xi - g om, so n = om and G = xi - g om / 2
                        G = xi - 0.5 * gk * om
                        cn = float(G @ om)
                        an = float(np.linalg.norm(G - cn * om))
                        for Is, wI in zip(ix, iw):
                            v = _kernels.k2_core(gk, cn, an, I, Is, m, d, code, c, alpha, btab, *rules.k2_args())
                            total += wk * wo * wI * (I * Is) ** (0.25 * d - 0.5) * v
                best = max(best, pref * total)
        sups.append(best)
    sups = np.array(sups)
    basis = 1.0 / N_list ** 2 + 1.0 / N_list
    fit_C = float(basis @ sups / (basis @ basis))
    fit_c1 = float(np.max(sups * N_list))
    return LGDProbe(N_list, sups, fit_C, fit_c1)


# --- operator files -------------------------------------------------------------------

def write_blop(path, op: NystromOperator) -> None:
    """Binary layout (all little endian): magic, u32 version, u8 mode, u32 ndims,
    u32 dims[ndims], u32 node width, u32 N, f64 nodes[N][width], f64 weights[N],
    f64 nu[N], f64 Kmat[N][N] row-major."""
    g = op.grid
    n, width = g.nodes.shape
    with open(path, "wb") as fh:
        fh.write(BLOP_MAGIC)
        fh.write(struct.pack("<IB", BLOP_VERSION, MODE_CODES[g.mode]))
        fh.write(struct.pack("<I", len(g.dims)))
        fh.write(struct.pack(f"<{len(g.dims)}I", *g.dims))
        fh.write(struct.pack("<II", width, n))
        for a in (g.nodes, g.weights, op.nu, op.Kmat):
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def read_blop(path) -> NystromOperator:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != BLOP_MAGIC:
        raise SpectralError(f"{path}: not an operator file")
    pos = 4
    version, mode = struct.unpack_from("<IB", data, pos)
    pos += 5
    if version != BLOP_VERSION:
        raise SpectralError(f"{path}: unsupported format version {version}")
    modes = {v: k for k, v in MODE_CODES.items()}
    if mode not in modes:
        raise SpectralError(f"{path}: unknown mode byte {mode}")
    (nd,) = struct.unpack_from("<I", data, pos)
    pos += 4
    dims = struct.unpack_from(f"<{nd}I", data, pos)
    pos += 4 * nd
    width, n = struct.unpack_from("<II", data, pos)
    pos += 8
    sizes = [n * width, n, n, n * n]
    if len(data) != pos + 8 * sum(sizes):
        raise SpectralError(f"{path}: truncated or oversized file")
    arrs = []
    for k in sizes:
        arrs.append(np.frombuffer(data, dtype="<f8", count=k, offset=pos).astype(float))
        pos += 8 * k
    grid = Grid(modes[mode], arrs[0].reshape(n, width), arrs[1], dims)
    return NystromOperator(grid, arrs[3].reshape(n, n), arrs[2], {"source": str(path)})
