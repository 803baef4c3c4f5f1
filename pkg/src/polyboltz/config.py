"""Run configuration: a sectioned key = value file read with configparser.

Sections and keys (all optional, defaults in parentheses):

    [gas]        m (1.0), delta (2.0)
    [model]      variant (PowerLawE), C (1.0), b (alias of C), alpha (1.0), gamma (0.5)
    [quad]       any QuadratureSpec field, e.g. n_interval, n_semi, sphere_order, mc_seed
    [grid]       isotropic (12x10), full (7x18x6), refine (1.5)
    [run]        seed (20240531), workers (1), samples (1000), mc_samples (1000000)
    [output]     dir (.)
    [tolerances] scale (1.0)

Unknown sections or keys are errors.  ``POLYBOLTZ_CONFIG`` names a default file.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace

from .kinematics import GasModel
from .models import ScatteringModel
from .quadrature import QuadratureSpec
from .spectral import DEFAULT_DIMS, FULL, ISOTROPIC

ENV_VAR = "POLYBOLTZ_CONFIG"


class ConfigError(ValueError):
    pass


def parse_dims(text: str) -> tuple:
    try:
        dims = tuple(int(x) for x in str(text).lower().replace("*", "x").split("x"))
    except ValueError as exc:
        raise ConfigError(f"grid dims must look like 12x10, got {text!r}") from exc
    if not dims or any(d < 1 for d in dims):
        raise ConfigError(f"grid dims must be positive, got {text!r}")
    return dims


@dataclass
class RunConfig:
    gas: GasModel = field(default_factory=GasModel)
    model: ScatteringModel = field(default_factory=ScatteringModel)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    iso_dims: tuple = DEFAULT_DIMS[ISOTROPIC]
    full_dims: tuple = DEFAULT_DIMS[FULL]
    refine: float = 1.5
    seed: int = 20240531
    workers: int = 1
    samples: int = 1000
    mc_samples: int = 1_000_000
    out_dir: str = "."
    tol_scale: float = 1.0
    source: str | None = None


_QUAD_KEYS = {f.name: f.type for f in fields(QuadratureSpec)}
_SCHEMA = {
    "gas": {"m": float, "delta": float},
    "model": {"variant": str, "c": float, "b": float, "alpha": float, "gamma": float},
    "quad": {k: (float if k in ("v_max", "i_max") else int) for k in (n.lower() for n in _QUAD_KEYS)},
    "grid": {"isotropic": parse_dims, "full": parse_dims, "refine": float},
    "run": {"seed": int, "workers": int, "samples": int, "mc_samples": int},
    "output": {"dir": str},
    "tolerances": {"scale": float},
}


def _read(parser: configparser.ConfigParser) -> dict:
    out = {}
    for sec in parser.sections():
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        vals = {}
        for key, raw in parser.items(sec):
            conv = _SCHEMA[sec].get(key)
            if conv is None:
                raise ConfigError(f"unknown key {sec}.{key}")
            try:
                vals[key] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {sec}.{key}: {raw!r}") from exc
        out[sec] = vals
    return out


def build(values: dict, source: str | None = None) -> RunConfig:
    """RunConfig from a {section: {key: value}} mapping of already converted values."""
    try:
        g = values.get("gas", {})
        gas = GasModel(g.get("m", 1.0), g.get("delta", 2.0))
        mv = values.get("model", {})
        if "c" in mv and "b" in mv:
            raise ConfigError("give model.C or model.b, not both")
        model = ScatteringModel(mv.get("variant", "PowerLawE"), mv.get("c", mv.get("b", 1.0)),
                                mv.get("alpha", 1.0), mv.get("gamma", 0.5))
        names = {n.lower(): n for n in _QUAD_KEYS}
        quad = QuadratureSpec(**{names[k]: v for k, v in values.get("quad", {}).items()})
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    gr = values.get("grid", {})
    run = values.get("run", {})
    cfg = RunConfig(gas, model, quad, gr.get("isotropic", DEFAULT_DIMS[ISOTROPIC]),
                    gr.get("full", DEFAULT_DIMS[FULL]), gr.get("refine", 1.5),
                    run.get("seed", 20240531), run.get("workers", 1), run.get("samples", 1000),
                    run.get("mc_samples", 1_000_000), values.get("output", {}).get("dir", "."),
                    values.get("tolerances", {}).get("scale", 1.0), source)
    if len(cfg.iso_dims) != 2:
        raise ConfigError(f"isotropic grid needs two dims, got {cfg.iso_dims}")
    if len(cfg.full_dims) != 3:
        raise ConfigError(f"full grid needs three dims, got {cfg.full_dims}")
    if cfg.workers < 1 or cfg.samples < 1 or cfg.mc_samples < 2:
        raise ConfigError("run.workers, run.samples must be >= 1 and run.mc_samples >= 2")
    if not (cfg.tol_scale > 0 and cfg.refine > 1):
        raise ConfigError("tolerances.scale must be positive and grid.refine > 1")
    return cfg


def load(path: str | None = None) -> RunConfig:
    """Read ``path``, else the file named by POLYBOLTZ_CONFIG, else defaults."""
    path = path or os.environ.get(ENV_VAR) or None
    if path is None:
        return RunConfig()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return build(_read(parser), str(path))


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    """Copy with the non-None keyword values replaced (CLI flags)."""
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
