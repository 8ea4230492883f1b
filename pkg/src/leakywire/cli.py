"""Command-line front end: ``leakywire spectrum | resonance | scatter | verify``.

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure.
Sweep points run in a process pool bounded by ``--jobs``; rows are
always written in sweep order. Floats are written with ``repr`` so CSV
and JSON output re-read to identical values.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import replace
import io
import json
import math
from pathlib import Path
import sys

import numpy as np

from .config import ConfigError, default_config, load_config

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2

UNITS = {
    "a": "length",
    "delta": "length",
    "alpha": "1/length",
    "beta": "1",
    "q": "1",
    "point": "",
    "level": "",
    "kappa": "1/length",
    "energy": "1/length^2",
    "re_z": "1/length^2",
    "im_z": "1/length^2",
    "lambda": "1/length^2",
    "residual": "",
}


class UsageError(Exception):
    """Invalid command-line or configuration input (exit code 1)."""


# --------------------------------------------------------------------------
# Workers (module level so they can be sent to worker processes)


def _spectrum_point(item):
    from .bs3d import find_eigenvalues_3d
    from .spectrum2d import find_eigenvalues

    value, cfg = item
    q = cfg.solver.quadrature()
    try:
        spec = spectrum_system(cfg)
        if spec.dimension == 2:
            res = find_eigenvalues(spec, tol=cfg.solver.root_tol, cfg=q)
        else:
            res = find_eigenvalues_3d(spec, tol=cfg.solver.root_tol, cfg=q)
    except Exception as err:
        return [_failed_row(value, ["level", "kappa", "energy", "residual", "multiplicity", "near_threshold", "embedded"], err)]
    rows = []
    for i, r in enumerate(res.roots):
        rows.append(
            {
                "value": value,
                "level": i,
                "kappa": r.kappa,
                "energy": -r.kappa**2,
                "residual": r.residual,
                "multiplicity": r.multiplicity,
                "near_threshold": r.near_threshold,
                "embedded": False,
                "status": "ok",
            }
        )
    for j, e in enumerate(res.embedded):
        rows.append(
            {
                "value": value,
                "level": len(res.roots) + j,
                "kappa": e["kappa"],
                "energy": e["energy"],
                "residual": None,
                "multiplicity": 1,
                "near_threshold": False,
                "embedded": True,
                "status": "ok",
            }
        )
    return rows


def spectrum_system(cfg):
    """The configured system with ``resonance.q`` and ``resonance.delta`` applied to a mirror pair."""
    from .system import SystemSpec

    res = cfg.resonance
    mirror = _mirror(cfg) if (res.q or res.delta) else None
    if mirror is None:
        return cfg.system
    beta, a = mirror
    return SystemSpec.mirror_pair(cfg.system.alpha, beta, a, res.delta, beta + res.q, cfg.system.dimension)


def _failed_row(value, keys, err):
    row = {"value": value}
    row.update({k: None for k in keys})
    row["status"] = f"error: {type(err).__name__}: {err}"
    return row


def _mirror(cfg):
    from .spectrum2d import _mirror_parameters

    return _mirror_parameters(cfg.system)


def resonance_mode(cfg):
    """``"single"``, ``"coupling"`` or ``"distance"`` from the sweep and resonance settings."""
    param = cfg.sweep.parameter if cfg.sweep is not None else None
    if param == "q" or (param != "delta" and cfg.resonance.q != 0):
        return "coupling"
    if param == "delta" or cfg.resonance.delta != 0:
        return "distance"
    return "single"


RESONANCE_KEYS = {
    "single": ["re_z", "im_z", "residual", "iterations"],
    "coupling": ["re_z", "im_z", "residual", "iterations", "measured_linear", "predicted_linear", "measured_quadratic", "predicted_quadratic"],
    "distance": ["re_z", "im_z", "residual", "iterations", "measured_linear", "predicted_linear", "measured_quadratic", "physical"],
}


def _resonance_point(item):
    from .bs3d import find_resonance_3d
    from .resonance2d import find_resonance, find_resonance_coupling_break, find_resonance_distance_break

    value, cfg = item
    mode = resonance_mode(cfg)
    s = cfg.solver
    q = s.quadrature()
    seed = cfg.resonance.seed
    try:
        extra = {}
        if mode == "single":
            site = cfg.system.sites[0]
            if cfg.system.dimension == 2:
                pole = find_resonance(cfg.system.alpha, site.beta, site.depth, seed=seed, tol=s.pole_tol, cfg=q)
            else:
                pole = find_resonance_3d(cfg.system.alpha, site.beta, site.depth, seed=seed, tol=s.pole_tol)
        else:
            beta, a = _mirror(cfg)
            if mode == "coupling":
                r = find_resonance_coupling_break(cfg.system.alpha, beta, cfg.resonance.q, a, seed=seed, tol=s.pole_tol, cfg=q)
                extra = {"predicted_quadratic": r.predicted_quadratic}
            else:
                r = find_resonance_distance_break(
                    cfg.system.alpha, beta, a, cfg.resonance.delta, cfg.resonance.form, seed=seed, tol=s.pole_tol, cfg=q
                )
                extra = {"physical": r.physical}
            pole = r.pole
            extra.update(
                {"measured_linear": r.measured_linear, "predicted_linear": r.predicted_linear, "measured_quadratic": r.measured_quadratic}
            )
    except Exception as err:
        return [_failed_row(value, RESONANCE_KEYS[mode], err)]
    row = {"value": value, "re_z": pole.z.real, "im_z": pole.z.imag, "residual": pole.residual, "iterations": pole.iterations}
    row.update(extra)
    row["status"] = "ok"
    return [row]


SCATTER_KEYS = ["lambda", "re_R", "im_R", "abs_R2", "abs_T2", "unitarity_defect"]


def scatter_grid(cfg):
    thr = -0.25 * cfg.system.alpha**2
    sc = cfg.scatter
    if sc.lam_from is None and sc.lam_to is None:
        return np.linspace(thr, 0.0, sc.count + 2)[1:-1]
    lo = sc.lam_from if sc.lam_from is not None else thr
    hi = sc.lam_to if sc.lam_to is not None else 0.0
    if sc.lam_from is None or sc.lam_to is None:
        grid = np.linspace(lo, hi, sc.count + 1)
        return grid[1:] if sc.lam_from is None else grid[:-1]
    return np.linspace(lo, hi, sc.count)


def _scatter_point(item):
    from .scattering2d import amplitudes

    value, cfg = item
    site = cfg.system.sites[0]
    q = cfg.solver.quadrature()
    rows = []
    for lam in scatter_grid(cfg):
        try:
            amp = amplitudes(cfg.system.alpha, site.beta, site.depth, float(lam), q)
        except Exception as err:
            row = _failed_row(value, SCATTER_KEYS, err)
            row["lambda"] = float(lam)
            rows.append(row)
            continue
        r, t = amp.reflection, amp.transmission
        rows.append(
            {
                "value": value,
                "lambda": float(lam),
                "re_R": r.real,
                "im_R": r.imag,
                "abs_R2": abs(r) ** 2,
                "abs_T2": abs(t) ** 2,
                "unitarity_defect": amp.flux_defect,
                "status": "ok",
            }
        )
    return rows


# --------------------------------------------------------------------------
# Emitters


def _column_header(name):
    unit = UNITS.get(name)
    return f"{name} [{unit}]" if unit else name


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def emit(table, fmt, stream):
    """Write ``{"command", "columns", "rows", ...}`` as CSV or JSON."""
    if fmt == "json":
        json.dump(table, stream, indent=1, allow_nan=True)
        stream.write("\n")
        return
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([_column_header(c) for c in table["columns"]])
    for row in table["rows"]:
        writer.writerow([_cell(row.get(c)) for c in table["columns"]])


def load_results(path):
    """Read back a JSON results file written by :func:`emit`."""
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _to_builtin(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _run_points(worker, cfg, jobs):
    items = cfg.points()
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(worker, items))
    else:
        chunks = [worker(it) for it in items]
    rows = [r for chunk in chunks for r in chunk]
    name = cfg.sweep.parameter if cfg.sweep is not None else "point"
    out = []
    for r in rows:
        r = {k: _to_builtin(v) for k, v in r.items()}
        r[name] = r.pop("value")
        out.append(r)
    return name, out


def _table(command, name, keys, rows):
    columns = [name] + keys + ["status"]
    ordered = [{c: row.get(c) for c in columns} for row in rows]
    failures = [r for r in ordered if r["status"] != "ok"]
    return {"command": command, "columns": columns, "rows": ordered, "failures": len(failures)}


# --------------------------------------------------------------------------
# Commands


def _check_embedded_regime(cfg):
    """Refuse resonance runs that cannot be auto-seeded."""
    from .specfun import point_only_eigenvalue
    from .spectrum2d import antisymmetric_root

    if cfg.resonance.seed is not None:
        return
    mode = resonance_mode(cfg)
    for value, pt in cfg.points():
        alpha = pt.system.alpha
        thr = -0.25 * alpha**2
        where = "" if value is None else f" at {cfg.sweep.parameter} = {value}"
        if mode == "single":
            if pt.system.n != 1:
                raise UsageError("single-site resonance needs exactly one site (or set resonance.q / resonance.delta)")
            beta = pt.system.sites[0].beta
            eps = point_only_eigenvalue(beta, pt.system.dimension)
            if eps is None or not eps > thr:
                raise UsageError(f"point level is not embedded in (-alpha^2/4, 0){where}; supply --seed-re/--seed-im")
        else:
            if pt.system.dimension != 2:
                raise UsageError("broken-symmetry resonances are implemented for d=2 only")
            mirror = _mirror(pt)
            if mirror is None:
                raise UsageError("broken-symmetry resonances need a mirror pair (0, a), (0, -a) with equal beta")
            k2 = antisymmetric_root(*mirror)
            if k2 is None or not -k2 * k2 > thr:
                raise UsageError(f"mirror-pair level mu2 is not embedded{where}; supply --seed-re/--seed-im")


def cmd_spectrum(cfg, jobs=1):
    name, rows = _run_points(_spectrum_point, cfg, jobs)
    keys = ["level", "kappa", "energy", "residual", "multiplicity", "near_threshold", "embedded"]
    return _table("spectrum", name, keys, rows)


def cmd_resonance(cfg, jobs=1):
    _check_embedded_regime(cfg)
    name, rows = _run_points(_resonance_point, cfg, jobs)
    return _table("resonance", name, RESONANCE_KEYS[resonance_mode(cfg)], rows)


def cmd_scatter(cfg, jobs=1):
    from .scattering2d import lineshape_peak
    from .resonance2d import find_resonance
    from .specfun import point_only_eigenvalue

    if cfg.system.dimension != 2:
        raise UsageError("scattering implemented for d=2 only")
    if cfg.system.n != 1:
        raise UsageError("scattering implemented for a single site only")
    name, rows = _run_points(_scatter_point, cfg, jobs)
    table = _table("scatter", name, SCATTER_KEYS, rows)
    if cfg.sweep is None:
        site = cfg.system.sites[0]
        alpha = cfg.system.alpha
        if point_only_eigenvalue(site.beta, 2) > -0.25 * alpha**2:
            q = cfg.solver.quadrature()
            try:
                pole = find_resonance(alpha, site.beta, site.depth, tol=cfg.solver.pole_tol, cfg=q).z
                peak = lineshape_peak(alpha, site.beta, site.depth, pole=pole, cfg=q)
                table["peak"] = {"lambda": peak.lam, "reflectance": peak.reflectance, "re_z": pole.real, "im_z": pole.imag}
            except Exception as err:
                table["peak"] = {"status": f"error: {type(err).__name__}: {err}"}
    return table


def cmd_verify(cfg):
    from .verify import run_suite

    checks = run_suite(cfg)
    rows = [{"criterion": c.criterion, "name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
    return {"command": "verify", "columns": ["criterion", "name", "passed", "detail"], "rows": rows, "failures": sum(not c.passed for c in checks)}


# --------------------------------------------------------------------------
# Entry point


def build_parser():
    parser = argparse.ArgumentParser(prog="leakywire", description="Line/plane plus point interactions: spectra, resonances, scattering.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "isolated and embedded eigenvalues"),
        ("resonance", "second-sheet resonance poles"),
        ("scatter", "reflection and transmission on the open channel"),
        ("verify", "run the acceptance checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="TOML or JSON run configuration")
        p.add_argument("--dimension", type=int, choices=(2, 3), default=2, help="built-in default system when no --config is given")
        p.add_argument("--output", type=Path, help="output file (default: standard output)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (overrides the config)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points")
        p.add_argument("--tol", type=float, help="root and pole tolerance (overrides the config)")
        if name == "resonance":
            p.add_argument("--seed-re", type=float, help="real part of the pole seed")
            p.add_argument("--seed-im", type=float, help="imaginary part of the pole seed")
    return parser


def _prepare(args):
    cfg = load_config(args.config) if args.config else default_config(args.dimension)
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    if args.tol is not None:
        if not (math.isfinite(args.tol) and args.tol > 0):
            raise UsageError("--tol must be a positive number")
        cfg = replace(cfg, solver=replace(cfg.solver, root_tol=args.tol, pole_tol=args.tol))
    if args.command == "resonance":
        if (args.seed_re is None) != (args.seed_im is None):
            raise UsageError("--seed-re and --seed-im must be given together")
        if args.seed_re is not None:
            cfg = replace(cfg, resonance=replace(cfg.resonance, seed=complex(args.seed_re, args.seed_im)))
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _prepare(args)
        fmt = args.format or cfg.output.format
        out_path = args.output or (Path(cfg.output.path) if cfg.output.path else None)
        if args.command == "spectrum":
            table = cmd_spectrum(cfg, args.jobs)
        elif args.command == "resonance":
            table = cmd_resonance(cfg, args.jobs)
        elif args.command == "scatter":
            table = cmd_scatter(cfg, args.jobs)
        else:
            table = cmd_verify(cfg)
    except (ConfigError, UsageError) as err:
        print(f"leakywire: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    buf = io.StringIO()
    emit(table, fmt, buf)
    if out_path is None:
        sys.stdout.write(buf.getvalue())
    else:
        out_path.write_text(buf.getvalue(), encoding="utf-8")
    if args.command == "verify":
        for row in table["rows"]:
            mark = "PASS" if row["passed"] else "FAIL"
            print(f"[{mark}] {row['criterion']:2d} {row['name']}: {row['detail']}", file=sys.stderr)
    else:
        for row in table["rows"]:
            if row["status"] != "ok":
                print(f"leakywire: failure at {table['columns'][0]} = {row[table['columns'][0]]}: {row['status']}", file=sys.stderr)
        if "peak" in table:
            print(f"leakywire: reflectance peak {table['peak']}", file=sys.stderr)
    return EXIT_SOLVER if table["failures"] else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
