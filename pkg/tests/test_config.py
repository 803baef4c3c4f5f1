from __future__ import annotations

import pytest

from polyboltz.config import ENV_VAR, ConfigError, RunConfig, load, parse_dims, with_overrides


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_defaults():
    cfg = load(None)
    assert cfg == RunConfig()
    assert cfg.iso_dims == (12, 10) and cfg.full_dims == (7, 18, 6)
    assert cfg.model.variant == "PowerLawE" and cfg.model.alpha == 1.0


def test_full_file(tmp_path):
    cfg = load(write(tmp_path, """
[gas]
m = 2.0
delta = 3
[model]
variant = GP20Model2
C = 1.5
alpha = 0.5
[quad]
n_semi = 4
v_max = 7.5
[grid]
isotropic = 6x5
full = 3x6x2
[run]
seed = 7
workers = 2
[output]
dir = out
[tolerances]
scale = 2
"""))
    assert cfg.gas.m == 2.0 and cfg.gas.delta == 3.0
    assert cfg.model.variant == "GP20Model2" and cfg.model.C == 1.5 and cfg.model.alpha == 0.5
    assert cfg.quad.n_semi == 4 and cfg.quad.v_max == 7.5
    assert cfg.iso_dims == (6, 5) and cfg.full_dims == (3, 6, 2)
    assert (cfg.seed, cfg.workers, cfg.out_dir, cfg.tol_scale) == (7, 2, "out", 2.0)


def test_b_is_an_alias_of_C(tmp_path):
    assert load(write(tmp_path, "[model]\nb = 3\n")).model.C == 3.0
    with pytest.raises(ConfigError):
        load(write(tmp_path, "[model]\nb = 3\nC = 2\n"))


@pytest.mark.parametrize("text", [
    "[gas]\nmass = 1\n",
    "[physics]\nm = 1\n",
    "[gas]\nm = heavy\n",
    "[gas]\nm = -1\n",
    "[model]\nvariant = Hard\n",
    "[grid]\nisotropic = 12x10x3\n",
    "[grid]\nfull = 0x3x3\n",
    "[run]\nworkers = 0\n",
    "[tolerances]\nscale = 0\n",
    "no section header\n",
])
def test_bad_configs(tmp_path, text):
    with pytest.raises(ConfigError):
        load(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load(str(tmp_path / "absent.ini"))


def test_environment_variable(tmp_path, monkeypatch):
    path = write(tmp_path, "[run]\nseed = 99\n")
    monkeypatch.setenv(ENV_VAR, path)
    assert load(None).seed == 99
    # an explicit path wins
    assert load(write(tmp_path, "[run]\nseed = 5\n", "b.ini")).seed == 5


def test_overrides():
    cfg = with_overrides(RunConfig(), seed=3, workers=None)
    assert cfg.seed == 3 and cfg.workers == 1


def test_parse_dims():
    assert parse_dims("12x10") == (12, 10)
    assert parse_dims("7X18x6") == (7, 18, 6)
    for bad in ("12,10", "x", "3x-1"):
        with pytest.raises(ConfigError):
            parse_dims(bad)
