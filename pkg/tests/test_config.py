import json
from pathlib import Path

import pytest

from leakywire.config import (
    ConfigError,
    apply_parameter,
    default_config,
    load_config,
    make_grid,
    parse_config,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def base(**overrides):
    raw = {"schema_version": 1, "dimension": 2, "alpha": 3.0, "sites": [{"position": [0.0, 2.0], "beta": 0.0}]}
    raw.update(overrides)
    return raw


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.toml")), ids=lambda p: p.name)
def test_shipped_configs_load(path):
    cfg = load_config(path)
    assert cfg.system.dimension in (2, 3)


def test_defaults_fill_solver_and_output():
    cfg = parse_config(base())
    assert cfg.solver.root_tol == 1e-10
    assert cfg.solver.pole_tol == 1e-10
    assert cfg.output.format == "csv"
    assert cfg.sweep is None
    assert cfg.points() == [(None, cfg)]


@pytest.mark.parametrize(
    "overrides,field",
    [
        ({"schema_version": 2}, "schema_version"),
        ({"dimension": 4}, "dimension"),
        ({"alpha": -1.0}, "alpha"),
        ({"alpha": "x"}, "alpha"),
        ({"sites": []}, "sites"),
        ({"sites": [{"position": [0.0], "beta": 0.0}]}, "sites[0].position"),
        ({"sites": [{"position": [0.0, 1.0]}]}, "sites[0].beta"),
        ({"sites": [{"position": [0.0, 0.0], "beta": 0.0}]}, "site 0"),
        ({"solver": {"root_tol": 0.0}}, "solver.root_tol"),
        ({"sweep": {"parameter": "gamma", "values": [1.0]}}, "sweep.parameter"),
        ({"sweep": {"parameter": "a", "values": [1.0, 3.0, 2.0]}}, "sweep.values"),
        ({"sweep": {"parameter": "a", "grid": {"kind": "cubic", "from": 1, "to": 2, "count": 3}}}, "sweep.grid.kind"),
        ({"sweep": {"parameter": "a", "grid": {"from": 1, "to": 2, "count": 0}}}, "sweep.grid.count"),
        ({"sweep": {"parameter": "a", "values": [1.0, -1.0]}}, "sweep"),
        ({"output": {"format": "xml"}}, "output.format"),
        ({"resonance": {"seed": [1.0]}}, "resonance.seed"),
        ({"resonance": {"form": "full"}}, "resonance.form"),
        ({"scatter": {"from": -3.0}}, "scatter.from"),
        ({"scatter": {"count": True}}, "scatter.count"),
    ],
)
def test_schema_errors_name_the_field(overrides, field):
    with pytest.raises(ConfigError) as info:
        parse_config(base(**overrides))
    assert field in str(info.value)


def test_grids():
    assert make_grid({"kind": "linear", "from": 0, "to": 1, "count": 5}) == (0.0, 0.25, 0.5, 0.75, 1.0)
    geo = make_grid({"kind": "geometric", "from": 0.25, "to": 16.0, "count": 13})
    assert len(geo) == 13
    assert geo[0] == pytest.approx(0.25) and geo[-1] == pytest.approx(16.0)
    assert geo[1] / geo[0] == pytest.approx(geo[-1] / geo[-2])
    assert make_grid({"from": 3, "to": 1, "count": 3}) == (3.0, 2.0, 1.0)
    assert make_grid({"from": 2, "to": 5, "count": 1}) == (2.0,)
    with pytest.raises(ConfigError, match="positive endpoints"):
        make_grid({"kind": "geometric", "from": 0, "to": 1, "count": 3})
    with pytest.raises(ConfigError, match="monotone"):
        make_grid({"from": 1, "to": 1, "count": 3})


def test_toml_and_json_are_equivalent(tmp_path):
    toml_cfg = load_config(CONFIGS / "sweep_distance_2d.toml")
    raw = {
        "schema_version": 1,
        "dimension": 2,
        "alpha": 2.0,
        "sites": [{"position": [0.0, 1.0], "beta": 0.0}],
        "sweep": {"parameter": "a", "grid": {"kind": "geometric", "from": 0.25, "to": 16.0, "count": 13}},
        "output": {"format": "csv"},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(raw))
    assert load_config(path) == toml_cfg


def test_syntax_errors_report_position(tmp_path):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text('{"alpha": 3.0,\n "dimension": }')
    with pytest.raises(ConfigError, match="line 2"):
        load_config(bad_json)
    bad_toml = tmp_path / "bad.toml"
    bad_toml.write_text("alpha = 3.0\ndimension = = 2\n")
    with pytest.raises(ConfigError, match="line 2"):
        load_config(bad_toml)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.toml")


def test_apply_parameter():
    cfg = parse_config(base(sites=[{"position": [0.0, 2.0], "beta": 0.0}, {"position": [0.0, -2.0], "beta": 0.0}]))
    moved = apply_parameter(cfg, "a", 3.0)
    assert [s.position for s in moved.system.sites] == [(0.0, 3.0), (0.0, -3.0)]
    assert all(s.beta == -0.5 for s in apply_parameter(cfg, "beta", -0.5).system.sites)
    assert apply_parameter(cfg, "alpha", 4.0).system.alpha == 4.0
    assert apply_parameter(cfg, "q", 1e-3).resonance.q == 1e-3
    assert apply_parameter(cfg, "delta", 0.1).resonance.delta == 0.1
    with pytest.raises(ConfigError):
        apply_parameter(cfg, "a", 0.0)
    with pytest.raises(ConfigError):
        apply_parameter(cfg, "gamma", 1.0)


def test_sweep_points_follow_grid_order():
    cfg = load_config(CONFIGS / "sweep_distance_2d.toml")
    pts = cfg.points()
    assert [v for v, _ in pts] == list(cfg.sweep.values)
    assert all(c.system.sites[0].position[-1] == v for v, c in pts)


def test_default_configs():
    assert default_config(2).system.dimension == 2
    three = default_config(3)
    assert three.system.dimension == 3
    assert three.system.sites[0].beta == -0.1
