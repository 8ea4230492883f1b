"""Run configuration: parsing, validation and parameter sweeps.

A run is described by one TOML file (or the same schema encoded as
JSON)::

    schema_version = 1
    dimension = 2
    alpha = 2.0

    [[sites]]
    position = [0.0, 1.0]
    beta = 0.0

    [solver]
    root_tol = 1e-10
    quad_abs_tol = 1e-14
    quad_rel_tol = 1e-12
    pole_tol = 1e-10

    [sweep]
    parameter = "a"
    grid = { kind = "geometric", from = 0.25, to = 16.0, count = 13 }

    [output]
    format = "csv"

Optional tables ``[resonance]`` (``seed = [re, im]``, ``form``, ``q``,
``delta``) and ``[scatter]`` (``from``, ``to``, ``count`` for the energy
grid) configure the corresponding subcommands.
"""

from dataclasses import dataclass, field, replace
import json
import math
from pathlib import Path

import numpy as np

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .quadrature import QuadratureConfig
from .system import ConfigurationError, Site, SystemSpec

SCHEMA_VERSION = 1
SWEEP_PARAMETERS = ("a", "beta", "q", "delta", "alpha")
GRID_KINDS = ("linear", "geometric")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid configuration file; the message names the offending field."""


@dataclass(frozen=True)
class SolverSettings:
    root_tol: float = 1e-10
    quad_abs_tol: float = 1e-14
    quad_rel_tol: float = 1e-12
    pole_tol: float = 1e-10

    def quadrature(self):
        return QuadratureConfig(abs_tol=self.quad_abs_tol, rel_tol=self.quad_rel_tol)


@dataclass(frozen=True)
class Sweep:
    """One sweep axis with an explicit, strictly monotone grid."""

    parameter: str
    values: tuple


@dataclass(frozen=True)
class OutputSettings:
    format: str = "csv"
    path: object = None


@dataclass(frozen=True)
class ResonanceSettings:
    seed: object = None
    form: str = "reduced"
    q: float = 0.0
    delta: float = 0.0


@dataclass(frozen=True)
class ScatterSettings:
    lam_from: object = None
    lam_to: object = None
    count: int = 200


@dataclass(frozen=True)
class RunConfig:
    system: SystemSpec
    solver: SolverSettings = field(default_factory=SolverSettings)
    sweep: object = None
    output: OutputSettings = field(default_factory=OutputSettings)
    resonance: ResonanceSettings = field(default_factory=ResonanceSettings)
    scatter: ScatterSettings = field(default_factory=ScatterSettings)

    def points(self):
        """``[(sweep value or None, RunConfig for that point)]`` in sweep order."""
        if self.sweep is None:
            return [(None, self)]
        return [(v, apply_parameter(self, self.sweep.parameter, v)) for v in self.sweep.values]


def _number(table, key, where, default=None, positive=False):
    if key not in table:
        if default is None:
            raise ConfigError(f"{where}.{key}: required field missing")
        return default
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{where}.{key}: expected a finite number, got {val!r}")
    if positive and not val > 0:
        raise ConfigError(f"{where}.{key}: must be positive, got {val!r}")
    return float(val)


def _table(raw, key):
    val = raw.get(key, {})
    if not isinstance(val, dict):
        raise ConfigError(f"{key}: expected a table")
    return val


def make_grid(spec, where="sweep.grid"):
    """Grid values from ``{kind, from, to, count}``; strictly monotone."""
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: expected a table")
    kind = spec.get("kind", "linear")
    if kind not in GRID_KINDS:
        raise ConfigError(f"{where}.kind: must be one of {GRID_KINDS}, got {kind!r}")
    lo = _number(spec, "from", where)
    hi = _number(spec, "to", where)
    count = spec.get("count")
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise ConfigError(f"{where}.count: expected a positive integer, got {count!r}")
    if count == 1:
        values = np.array([lo])
    elif kind == "linear":
        values = np.linspace(lo, hi, count)
    else:
        if lo <= 0 or hi <= 0:
            raise ConfigError(f"{where}: geometric grid needs positive endpoints")
        values = np.geomspace(lo, hi, count)
    d = np.diff(values)
    if len(values) > 1 and not (np.all(d > 0) or np.all(d < 0)):
        raise ConfigError(f"{where}: grid is not strictly monotone")
    return tuple(float(v) for v in values)


def _parse_sites(raw, dimension):
    sites_raw = raw.get("sites")
    if not isinstance(sites_raw, list) or not sites_raw:
        raise ConfigError("sites: expected a non-empty array of tables")
    sites = []
    for i, s in enumerate(sites_raw):
        where = f"sites[{i}]"
        if not isinstance(s, dict):
            raise ConfigError(f"{where}: expected a table")
        pos = s.get("position")
        if not isinstance(pos, list) or len(pos) != dimension:
            raise ConfigError(f"{where}.position: expected {dimension} numbers")
        for c in pos:
            if isinstance(c, bool) or not isinstance(c, (int, float)):
                raise ConfigError(f"{where}.position: expected numbers, got {c!r}")
        sites.append(Site(tuple(float(c) for c in pos), _number(s, "beta", where)))
    return tuple(sites)


def parse_config(raw):
    """Validate a decoded configuration mapping and build a :class:`RunConfig`.

    Raises
    ------
    ConfigError
        With the dotted path of the offending field. Geometry errors from
        :class:`SystemSpec` are re-raised as ``ConfigError`` and keep the
        site index in their message.
    """
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a table")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    dimension = raw.get("dimension")
    if dimension not in (2, 3):
        raise ConfigError(f"dimension: must be 2 or 3, got {dimension!r}")
    alpha = _number(raw, "alpha", "top level", positive=True)
    sites = _parse_sites(raw, dimension)
    try:
        system = SystemSpec(dimension, alpha, sites)
    except ConfigurationError as err:
        raise ConfigError(f"sites: {err}") from err

    st = _table(raw, "solver")
    solver = SolverSettings(
        root_tol=_number(st, "root_tol", "solver", 1e-10, positive=True),
        quad_abs_tol=_number(st, "quad_abs_tol", "solver", 1e-14, positive=True),
        quad_rel_tol=_number(st, "quad_rel_tol", "solver", 1e-12, positive=True),
        pole_tol=_number(st, "pole_tol", "solver", 1e-10, positive=True),
    )

    sweep = None
    sw = _table(raw, "sweep")
    if sw:
        param = sw.get("parameter")
        if param not in SWEEP_PARAMETERS:
            raise ConfigError(f"sweep.parameter: must be one of {SWEEP_PARAMETERS}, got {param!r}")
        if "values" in sw:
            vals = sw["values"]
            if not isinstance(vals, list) or not vals:
                raise ConfigError("sweep.values: expected a non-empty array")
            values = tuple(_number({"v": v}, "v", "sweep.values") for v in vals)
            d = np.diff(values)
            if len(values) > 1 and not (np.all(d > 0) or np.all(d < 0)):
                raise ConfigError("sweep.values: grid is not strictly monotone")
        else:
            values = make_grid(sw.get("grid"), "sweep.grid")
        sweep = Sweep(param, values)

    ot = _table(raw, "output")
    fmt = ot.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output.format: must be one of {FORMATS}, got {fmt!r}")
    path = ot.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path: expected a string")
    output = OutputSettings(fmt, path)

    rt = _table(raw, "resonance")
    seed = rt.get("seed")
    if seed is not None:
        if not (isinstance(seed, list) and len(seed) == 2):
            raise ConfigError("resonance.seed: expected [re, im]")
        seed = complex(_number({"v": seed[0]}, "v", "resonance.seed"), _number({"v": seed[1]}, "v", "resonance.seed"))
    form = rt.get("form", "reduced")
    if form not in ("reduced", "exact"):
        raise ConfigError(f"resonance.form: must be 'reduced' or 'exact', got {form!r}")
    resonance = ResonanceSettings(seed, form, _number(rt, "q", "resonance", 0.0), _number(rt, "delta", "resonance", 0.0))

    sc = _table(raw, "scatter")
    thr = -0.25 * alpha**2
    count = sc.get("count", 200)
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise ConfigError(f"scatter.count: expected a positive integer, got {count!r}")
    lam_from = _number(sc, "from", "scatter", None) if "from" in sc else None
    lam_to = _number(sc, "to", "scatter", None) if "to" in sc else None
    for name, v in (("from", lam_from), ("to", lam_to)):
        if v is not None and not thr < v < 0:
            raise ConfigError(f"scatter.{name}: {v} must lie strictly inside ({thr}, 0)")
    scatter = ScatterSettings(lam_from, lam_to, count)

    cfg = RunConfig(system, solver, sweep, output, resonance, scatter)
    if sweep is not None:
        for v in sweep.values:
            apply_parameter(cfg, sweep.parameter, v)
    return cfg


def apply_parameter(cfg, name, value):
    """Return ``cfg`` with one sweep parameter set to ``value``.

    ``a`` sets the distance of every site from the line/plane (signs are
    kept); ``beta`` sets every coupling; ``alpha`` the line strength;
    ``q`` and ``delta`` the symmetry-breaking parameters of the resonance
    subcommand.
    """
    sys = cfg.system
    try:
        if name == "a":
            if not value > 0:
                raise ConfigError(f"sweep: a = {value} must be positive")
            sites = tuple(
                Site(s.position[:-1] + (math.copysign(value, s.position[-1]),), s.beta) for s in sys.sites
            )
            return replace(cfg, system=SystemSpec(sys.dimension, sys.alpha, sites))
        if name == "beta":
            sites = tuple(Site(s.position, float(value)) for s in sys.sites)
            return replace(cfg, system=SystemSpec(sys.dimension, sys.alpha, sites))
        if name == "alpha":
            if not value > 0:
                raise ConfigError(f"sweep: alpha = {value} must be positive")
            return replace(cfg, system=SystemSpec(sys.dimension, float(value), sys.sites))
    except ConfigurationError as err:
        raise ConfigError(f"sweep: {err}") from err
    if name == "q":
        return replace(cfg, resonance=replace(cfg.resonance, q=float(value)))
    if name == "delta":
        return replace(cfg, resonance=replace(cfg.resonance, delta=float(value)))
    raise ConfigError(f"sweep.parameter: unknown parameter {name!r}")


def load_config(path):
    """Read a ``.toml`` or ``.json`` configuration file.

    Raises
    ------
    ConfigError
        On I/O, syntax (with line and column) or schema errors.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"{path}: cannot read ({err.strerror})") from err
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from err
    else:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(f"{path}: {err}") from err
    return parse_config(raw)


def default_config(dimension=2):
    """Built-in reference configuration (one site, 2D or 3D)."""
    if dimension == 2:
        raw = {"schema_version": 1, "dimension": 2, "alpha": 3.0, "sites": [{"position": [0.0, 2.0], "beta": 0.0}]}
    else:
        raw = {
            "schema_version": 1,
            "dimension": 3,
            "alpha": 3.0,
            "sites": [{"position": [0.0, 0.0, 2.0], "beta": -0.1}],
        }
    return parse_config(raw)
