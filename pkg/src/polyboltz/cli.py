"""Command-line front end.

Exit codes: 0 success, 1 verification failure (and an empty ``nu`` grid),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from dataclasses import replace

import numpy as np

from . import linearized as lin
from . import spectral as sp
from . import verify as ver
from .config import ConfigError, RunConfig, load, parse_dims, with_overrides
from .kinematics import KinematicsError, PhasePoint
from .models import ModelError

NU_HEADER = ["s", "I", "nu_general", "nu_reduced", "lower_ratio", "upper_ratio"]
DEFAULT_NU_GRID = "0,1,2,3,4x0.1,0.7,2,5"
ROUTE_TOL = 5e-3


class UsageError(ValueError):
    pass


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def parse_nu_grid(text: str):
    """"s1,s2,...xI1,I2,..." -> (speeds, energies); empty lists give empty arrays."""
    if "x" not in text:
        raise UsageError(f"grid must look like '0,1,2x0.5,1', got {text!r}")
    a, b = text.split("x", 1)
    try:
        s = [float(v) for v in a.split(",") if v.strip()]
        I = [float(v) for v in b.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"grid values must be numbers: {text!r}") from exc
    if any(v < 0 for v in s) or any(v <= 0 for v in I):
        raise UsageError("speeds must be >= 0 and energies > 0")
    return np.array(s), np.array(I)


def _model_for(cfg: RunConfig, args):
    model = cfg.model
    if getattr(args, "alpha", None) is not None:
        model = replace(model, alpha=args.alpha)
    if getattr(args, "inject_negative_C", False):
        # test hook: bypasses validation to produce a broken kernel
        model = replace(model)
        object.__setattr__(model, "C", -abs(model.C))
    return model


def _out_path(cfg: RunConfig, given: str | None, default: str) -> str:
    return given if given else os.path.join(cfg.out_dir, default)


# --- commands ----------------------------------------------------------------------

def cmd_nu(cfg: RunConfig, args) -> int:
    S, I = parse_nu_grid(args.grid)
    if len(S) == 0 or len(I) == 0:
        print("error: empty nu grid", file=sys.stderr)
        return 1
    model = _model_for(cfg, args)
    SS, II = np.meshgrid(S, I, indexing="ij")
    SS, II = SS.ravel(), II.ravel()
    gen = lin.nu_general_many(SS, II, cfg.gas, model, cfg.quad)
    reduced = model.variant == "PowerLawE"
    worst = 0.0
    rows = []
    for s, e, g in zip(SS, II, gen):
        p = PhasePoint((0.0, 0.0, s), e)
        red = lin.nu_reduced_e1(p, cfg.gas, model.alpha, model.C, cfg.quad) if reduced else math.nan
        if reduced:
            worst = max(worst, abs(g - red) / abs(g))
        lo, up = lin.nu_envelope_ratios(p, cfg.gas, model.alpha, args.epsilon, g)
        rows.append([repr(float(v)) for v in (s, e, g, red, lo, up)])
    out = _out_path(cfg, args.out, "nu.csv")
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NU_HEADER)
        w.writerows(rows)
    if worst > ROUTE_TOL * cfg.tol_scale:
        print(f"error: nu routes disagree by {worst:.3g} (limit {ROUTE_TOL * cfg.tol_scale:g})", file=sys.stderr)
        return 2
    return 0


def _point_arg(text: str) -> PhasePoint:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"point must be 'vx,vy,vz,I', got {text!r}") from exc
    if len(vals) != 4:
        raise UsageError(f"point must be 'vx,vy,vz,I', got {text!r}")
    return PhasePoint(vals[:3], vals[3])


def cmd_kernel(cfg: RunConfig, args) -> int:
    k = lin.KernelArgs(_point_arg(args.x), _point_arg(args.y))
    model = _model_for(cfg, args)
    k1 = lin.k1_eval(k, cfg.gas, model, cfg.quad)
    k2 = lin.k2_eval(k, cfg.gas, model, cfg.quad)
    _emit({"x": args.x, "y": args.y, "k1": k1, "k2": k2, "k": k2 - k1})
    return 0


def cmd_assemble(cfg: RunConfig, args) -> int:
    mode = args.mode
    dims = parse_dims(args.dims) if args.dims else (cfg.iso_dims if mode == sp.ISOTROPIC else cfg.full_dims)
    grid = sp.make_grid(mode, dims, cfg.gas)
    model = _model_for(cfg, args)
    t0 = time.perf_counter()
    op = sp.assemble(grid, cfg.gas, model, cfg.quad, cfg.workers)
    wall = time.perf_counter() - t0
    out = _out_path(cfg, args.out, f"operator_{mode}.blop")
    sp.write_blop(out, op)
    n = len(grid)
    _emit({"path": out, "mode": mode, "dims": list(grid.dims), "nodes": n, "entries": n * n,
           "kernel_pairs": op.meta.get("pairs"), "wall_seconds": wall,
           "entries_per_second": n * n / wall if wall > 0 else None, "sha256": op.checksum()})
    return 0


def cmd_spectrum(cfg: RunConfig, args) -> int:
    op = sp.read_blop(args.input)
    sym = sp.symmetrized_L(op)
    ev, _ = sp.eigendecompose(sym.matrix, tol=1e-8)
    svd = sp.svd_decay(op)
    res = sp.nullspace_residuals(op, cfg.gas, sym.matrix)
    co = sp.coercivity_estimate(op, sym.matrix)
    _emit({"source": args.input, "mode": op.mode, "dims": list(op.grid.dims),
           "symmetrization_correction": sym.correction,
           "eigenvalues_L": ev.tolist(), "singular_values_K": svd.values.tolist(), "sv_ratios": svd.ratios,
           "null_residuals": res, "spectral_gap": ver.spectral_gap(op, sym.matrix), "coercivity_lambda": co.lam},
          args.out)
    return 0


def _run_checks(cfg: RunConfig, args, suite: str) -> int:
    ctx = ver.Context(cfg.gas, _model_for(cfg, args), cfg.quad, cfg.iso_dims, cfg.full_dims, cfg.refine,
                      cfg.seed, cfg.samples, cfg.mc_samples, cfg.workers, cfg.tol_scale)
    checks = ver.run_suite(suite, ctx)
    rep = ver.report(checks, ctx.notes)
    rep["suite"] = suite
    _emit(rep, args.out)
    for c in checks:
        if not c.passed:
            print(f"FAILED {c.name}: value {c.value!r} tol {c.tol!r}", file=sys.stderr)
    return 0 if rep["passed"] else 1


def cmd_qcheck(cfg: RunConfig, args) -> int:
    return _run_checks(cfg, args, "q")


def cmd_verify(cfg: RunConfig, args) -> int:
    return _run_checks(cfg, args, args.suite)


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file (default: $POLYBOLTZ_CONFIG, else built-in defaults)")
    common.add_argument("--seed", type=int, help="seed for Monte-Carlo and random sampling")
    common.add_argument("--workers", type=int, help="worker threads")
    common.add_argument("--tol-scale", type=float, help="multiplier applied to every tolerance")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress and timings to stderr")
    common.add_argument("--inject-negative-C", action="store_true", help=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="polyboltz", description="Linearized polyatomic Boltzmann operator tools")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("nu", parents=[common], help="collision frequency table (CSV)")
    q.add_argument("--alpha", type=float)
    q.add_argument("--grid", default=DEFAULT_NU_GRID, help="speeds x energies, e.g. '0,1,2x0.5,1'")
    q.add_argument("--epsilon", type=float, default=0.1)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_nu)

    q = sub.add_parser("kernel", parents=[common], help="k1, k2 and k at one argument pair (JSON)")
    q.add_argument("--x", required=True, help="vx,vy,vz,I")
    q.add_argument("--y", required=True, help="vx,vy,vz,I")
    q.add_argument("--alpha", type=float)
    q.set_defaults(fn=cmd_kernel)

    q = sub.add_parser("assemble", parents=[common], help="assemble the Nystrom operator (binary file)")
    q.add_argument("--mode", choices=(sp.ISOTROPIC, sp.FULL), default=sp.ISOTROPIC)
    q.add_argument("--dims", help="grid dims, e.g. 12x10 or 7x18x6")
    q.add_argument("--alpha", type=float)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_assemble)

    q = sub.add_parser("spectrum", parents=[common], help="eigen and singular values of an operator file (JSON)")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_spectrum)

    q = sub.add_parser("qcheck", parents=[common], help="collision operator checks (JSON)")
    q.add_argument("--alpha", type=float)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_qcheck)

    q = sub.add_parser("verify", parents=[common], help="verification suites (JSON)")
    q.add_argument("--suite", choices=ver.SUITES + ("all",), default="all")
    q.add_argument("--alpha", type=float)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    try:
        cfg = load(args.config)
        cfg = with_overrides(cfg, seed=args.seed, workers=args.workers, tol_scale=args.tol_scale)
        if cfg.workers < 1 or not cfg.tol_scale > 0:
            raise ConfigError("--workers must be >= 1 and --tol-scale positive")
        return args.fn(cfg, args)
    except (ConfigError, UsageError, ModelError, KinematicsError, lin.LinearizedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except sp.SpectralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
