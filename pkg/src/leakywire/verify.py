"""Acceptance checks with explicit pass/fail results.

Each ``check_*`` function evaluates one numbered criterion at its stated
parameters and tolerance and returns a :class:`Check`; nothing is
relaxed to make a check pass. :func:`run_suite` runs the checks that
apply to a configuration's dimension, using its quadrature settings, and
adds a spectrum sanity check for the configured system itself.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .bs2d import build_d_matrix, krein_diagonal_check, symmetric_pair_factors
from .bs3d import (
    find_eigenvalues_3d,
    find_resonance_3d,
    large_distance_limit,
    phi_plane,
    phi_plane_continued,
    phi_plane_interval_quadrature,
)
from .config import SolverSettings
from .quadrature import boundary_limit, integrate, integrate_de, integrate_halfline
from .resonance2d import (
    distance_slope_richardson,
    find_resonance,
    find_resonance_coupling_break,
    find_resonance_distance_break,
    phi_continued,
)
from .scattering2d import lineshape_peak, pole_coincidence, reflectance_grid
from .specfun import point_only_eigenvalue, s_beta_real
from .spectrum2d import find_eigenvalues, single_point_asymptotics, single_root, symmetric_pair_spectrum
from .system import SystemSpec

EDGE_STEPS = tuple(1e-2 / 2**k for k in range(6))


@dataclass(frozen=True)
class Check:
    """Outcome of one acceptance criterion."""

    criterion: int
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion:2d} {self.name}: {self.detail}"


def _quad(settings):
    return (settings or SolverSettings()).quadrature()


def check_point_closed_forms(settings=None):
    """Criterion 1: point-only levels are roots of their coupling functions."""
    worst2 = max(
        abs(s_beta_real(b, math.sqrt(-point_only_eigenvalue(b, 2)))) for b in (-1.0, -0.5, 0.0, 0.5, 1.0)
    )
    worst3 = 0.0
    for b in (-1.0, -0.1):
        z = complex(point_only_eigenvalue(b, 3))
        worst3 = max(worst3, abs(b - 1j * cmath.sqrt(z) / (4 * math.pi)))
    ok = worst2 < 1e-12 and worst3 < 1e-12
    return Check(1, "point-only closed forms", ok, f"2D residual {worst2:.2e}, 3D residual {worst3:.2e} (< 1e-12)")


def check_single_site_2d(settings=None, samples=20, seed=20240531):
    """Criterion 2: uniqueness, monotonicity, large-distance limit and upper bound."""
    cfg = _quad(settings)
    rng = np.random.default_rng(seed)
    counts = []
    bound_ok = True
    for _ in range(samples):
        alpha = float(rng.uniform(0.5, 4.0))
        beta = float(rng.uniform(-1.0, 1.0))
        a = float(rng.uniform(0.2, 5.0))
        res = find_eigenvalues(SystemSpec.single(alpha, beta, a), cfg=cfg)
        counts.append(res.count)
        k0 = single_point_asymptotics(alpha, beta).kappa_zero_upper_bound
        bound_ok &= res.kappas[0] <= k0 * (1 + 1e-12)
    unique = all(c == 1 for c in counts)
    grid = np.geomspace(0.25, 16.0, 13)
    kappas = [single_root(2.0, 0.0, a, cfg=cfg).kappa for a in grid]
    monotone = bool(np.all(np.diff(kappas) < 0))
    k0 = single_point_asymptotics(2.0, 0.0).kappa_zero_upper_bound
    bound_ok &= max(kappas) <= k0
    limit_err = 0.0
    for alpha in (2.0, 4.0):
        lim = single_point_asymptotics(alpha, 0.0).limit_kappa_infinity
        k = find_eigenvalues(SystemSpec.single(alpha, 0.0, 40.0 / lim), cfg=cfg).roots[0]
        edge = k.bracket[1] if k.near_threshold else k.kappa
        limit_err = max(limit_err, abs(edge - lim))
    ok = unique and monotone and bound_ok and limit_err < 1e-3
    detail = (
        f"unique {sum(c == 1 for c in counts)}/{samples}, monotone={monotone}, "
        f"limit error {limit_err:.2e} (< 1e-3), kappa <= kappa0: {bool(bound_ok)}"
    )
    return Check(2, "single site (2D) uniqueness and monotonicity", ok, detail)


def check_krein_route(settings=None):
    """Criterion 3: diagonal entry vs the coincidence limit of the full Green function."""
    pairs = ((1.2, 0.5), (1.5, 1.0), (2.0, 2.0), (3.0, 0.3), (1.05, 4.0))
    worst = 0.0
    for kappa, a in pairs:
        out = krein_diagonal_check(SystemSpec.single(2.0, 0.0, a), kappa)
        worst = max(worst, out["difference"])
    return Check(3, "Krein-route equivalence", worst < 1e-7, f"max difference {worst:.2e} (< 1e-7)")


def check_pair_factorization(settings=None):
    """Criterion 4: mirror-pair factorisation and embedded-level bookkeeping."""
    cfg = _quad(settings)
    alpha, beta, a = 3.0, 0.0, 1.0
    spec = SystemSpec.mirror_pair(alpha, beta, a)
    worst = 0.0
    for kappa in np.linspace(1.55, 6.0, 20):
        det = float(np.linalg.det(build_d_matrix(spec, kappa, cfg).entries))
        f1, f2 = symmetric_pair_factors(alpha, beta, a, kappa, cfg)
        worst = max(worst, abs(det - f1 * f2))
    detect_ok = True
    order_ok = True
    for al in (1.5, 3.0, 6.0):
        ps = symmetric_pair_spectrum(al, beta, a, cfg)
        mu1, mu2 = ps.pair_levels
        embedded = mu2 is not None and -0.25 * al**2 < mu2 < 0
        detect_ok &= (ps.embedded is not None) == embedded
        order_ok &= mu1 < point_only_eigenvalue(beta, 2) < mu2
    k_a = symmetric_pair_spectrum(3.0, beta, a, cfg).kappa2
    k_b = symmetric_pair_spectrum(6.0, beta, a, cfg).kappa2
    shift = abs(k_a - k_b)
    ok = worst < 1e-12 and detect_ok and order_ok and shift < 1e-10
    detail = (
        f"factorisation error {worst:.2e} (< 1e-12), embedded detection {detect_ok}, "
        f"mu1 < eps < mu2 {order_ok}, kappa2 shift under alpha -> 2 alpha {shift:.1e}"
    )
    return Check(4, "symmetric-pair factorisation", ok, detail)


def edge_of_wedge_residuals(phi, boundary, lams):
    """Extrapolated ``|phi(lam +- i eps) - phi0(lam)|`` on both sides."""
    worst = 0.0
    for lam in lams:
        ref = boundary(lam)
        for side in (1.0, -1.0):
            lim = boundary_limit(lambda e, lam=lam, side=side: phi(complex(lam, side * e)), EDGE_STEPS)
            worst = max(worst, abs(lim.value - ref))
    return worst


def check_continuation(settings=None):
    """Criterion 5: edge-of-the-wedge matching at (alpha, a) = (3, 2), 2D and 3D."""
    cfg = _quad(settings)
    alpha, a = 3.0, 2.0
    lams = np.linspace(-2.2, -0.05, 10)
    w2 = edge_of_wedge_residuals(lambda z: phi_continued(z, alpha, a, cfg), lambda l: phi_continued(l, alpha, a, cfg), lams)
    w3 = edge_of_wedge_residuals(lambda z: phi_plane_continued(z, alpha, a), lambda l: phi_plane_continued(l, alpha, a), lams)
    ok = w2 < 1e-7 and w3 < 1e-7
    return Check(5, "analytic continuation", ok, f"2D residual {w2:.2e}, 3D residual {w3:.2e} (< 1e-7)")


def _slope(xs, ys):
    return float(np.polyfit(np.asarray(xs), np.asarray(ys), 1)[0])


def check_single_resonance(settings=None):
    """Criterion 6: single-site resonance ladder at alpha = 3, beta = 0."""
    s = settings or SolverSettings()
    cfg = s.quadrature()
    eps0 = point_only_eigenvalue(0.0, 2)
    ladder = (2.0, 3.0, 4.0, 5.0)
    poles = [find_resonance(3.0, 0.0, a, tol=s.pole_tol, cfg=cfg) for a in ladder]
    resid_ok = all(p.residual <= 1e-10 and p.nu < 0 for p in poles)
    widths = [abs(p.nu) for p in poles]
    shifts = [abs(p.mu - eps0) for p in poles]
    width_dec = all(widths[i + 1] < widths[i] for i in range(3))
    shift_dec = all(shifts[i + 1] < shifts[i] for i in range(3))
    slope = _slope(ladder, np.log(widths))
    target = -2.0 * math.sqrt(-eps0)
    rel = abs(slope - target) / abs(target)
    ok = resid_ok and width_dec and shift_dec and rel <= 0.30
    detail = (
        f"residuals/sign ok {resid_ok}, |nu| decreasing {width_dec}, |mu - eps0| decreasing {shift_dec}, "
        f"log|nu| slope {slope:.3f} vs {target:.3f} ({100 * rel:.1f}% off, limit 30%)"
    )
    return Check(6, "single-point resonance", ok, detail)


def check_scattering(settings=None):
    """Criterion 7: unitarity, lineshape peak and simple-pole growth at alpha = 3, a = 3."""
    cfg = _quad(settings)
    alpha, beta, a = 3.0, 0.0, 3.0
    lams = np.linspace(-0.25 * alpha**2, 0.0, 202)[1:-1]
    r, t = reflectance_grid(alpha, beta, a, lams, cfg)
    unit = float(np.max(np.abs(np.abs(t) ** 2 + np.abs(r) ** 2 - 1.0)))
    ident = float(np.max(np.abs(r.real + np.abs(r) ** 2)))
    coin = pole_coincidence(alpha, beta, a, cfg=cfg)
    peak = lineshape_peak(alpha, beta, a, pole=coin.pole, cfg=cfg)
    ok = unit < 1e-10 and ident < 1e-12 and peak.offset <= 1.0 and coin.simple_pole
    detail = (
        f"unitarity {unit:.1e} (< 1e-10), Re R + |R|^2 {ident:.1e} (< 1e-12), "
        f"peak offset {peak.offset:.2e} |Im z|, pole growth {', '.join(f'{x:.2f}' for x in coin.ratios)}"
    )
    return Check(7, "scattering unitarity", ok, detail)


def check_coupling_break(settings=None):
    """Criterion 8: linear and quadratic coefficients of the coupling-broken pole."""
    cfg = _quad(settings)
    r = find_resonance_coupling_break(3.0, 0.0, 1e-3, 1.0, cfg=cfg)
    lin = abs(r.measured_linear - r.predicted_linear) / abs(r.predicted_linear)
    quad = abs(r.measured_quadratic - r.predicted_quadratic) / abs(r.predicted_quadratic)
    ok = lin <= 0.05 and quad <= 0.05 and r.pole.nu < 0
    detail = (
        f"linear {r.measured_linear:.4f} vs {r.predicted_linear:.4f} ({100 * lin:.2f}%), "
        f"quadratic {r.measured_quadratic:.3f} vs {r.predicted_quadratic:.3f} ({100 * quad:.2f}%), nu {r.pole.nu:.2e}"
    )
    return Check(8, "broken-coupling expansion", ok, detail)


def check_distance_break(settings=None):
    """Criterion 9: slope of the distance-broken pole and the sign of its width."""
    cfg = _quad(settings)
    slope, _ = distance_slope_richardson(3.0, 0.0, 1.0, cfg=cfg)
    pred = find_resonance_distance_break(3.0, 0.0, 1.0, 1e-2, cfg=cfg).predicted_linear
    rel = abs(slope - pred) / abs(pred)
    iotas = {d: find_resonance_distance_break(3.0, 0.0, 1.0, d, cfg=cfg).pole.nu for d in (1e-2, -1e-2, 1e-3, -1e-3)}
    signs_ok = all(v < 0 for v in iotas.values())
    ok = rel <= 0.05 and signs_ok
    detail = (
        f"slope {slope:.6f} vs {pred:.6f} ({100 * rel:.3f}%), "
        f"Im z: {', '.join(f'{d:+g}: {v:+.2e}' for d, v in iotas.items())} (all < 0 required)"
    )
    return Check(9, "broken-distance expansion", ok, detail)


def check_spectrum_3d(settings=None):
    """Criterion 10: two routes for the plane coupling, small- and large-distance behaviour."""
    cfg = _quad(settings)
    worst = 0.0
    for alpha, a, kappa in ((3.0, 1.0, 2.0), (3.0, 0.1, 1.6), (2.0, 2.0, 1.01), (3.0, 1e-3, 5.0)):
        v1 = phi_plane(alpha, a, kappa)
        v2 = phi_plane(alpha, a, kappa, "radial", cfg)
        worst = max(worst, abs(v1 - v2) / max(1.0, abs(v1)))
    small = find_eigenvalues_3d(SystemSpec.single(3.0, -0.1, 1e-3, 3), cfg=cfg).kappas[0]
    lim_err = 0.0
    for beta in (-0.1, -0.5):
        root = find_eigenvalues_3d(SystemSpec.single(3.0, beta, 30.0, 3), cfg=cfg).roots[0]
        k = root.bracket[1] if root.near_threshold else root.kappa
        lim_err = max(lim_err, abs(k - large_distance_limit(3.0, beta)))
    ok = worst < 1e-11 and small > 100 and lim_err < 1e-2
    detail = (
        f"route agreement {worst:.1e} (< 1e-11), kappa at a = 1e-3: {small:.3f} (> 100 required), "
        f"large-a limit error {lim_err:.1e} (< 1e-2)"
    )
    return Check(10, "3D spectrum", ok, detail)


def check_resonance_3d(settings=None):
    """Criterion 11: boundary-value certification, then the 3D pole ladder."""
    cfg = _quad(settings)
    alpha, beta = 3.0, -0.1
    cert = 0.0
    for lam in (-2.0, -1.5, -1.0, -0.5, -0.1):
        closed = phi_plane_continued(lam, alpha, 2.0)
        lim = boundary_limit(lambda e, lam=lam: phi_plane_continued(complex(lam, e), alpha, 2.0), EDGE_STEPS)
        cert = max(cert, abs(lim.value - closed), abs(phi_plane_interval_quadrature(lam, alpha, 2.0, cfg) - closed))
    if cert >= 1e-8:
        return Check(11, "3D resonance", False, f"boundary certification failed ({cert:.1e} >= 1e-8); ladder not run")
    poles = [find_resonance_3d(alpha, beta, a) for a in (2.0, 3.0, 4.0)]
    widths = [abs(p.nu) for p in poles]
    dec = all(widths[i + 1] < widths[i] for i in range(2))
    neg = all(p.nu < 0 for p in poles)
    ok = dec and neg
    detail = f"boundary certification {cert:.1e} (< 1e-8), |nu| ladder {', '.join(f'{w:.2e}' for w in widths)}"
    return Check(11, "3D resonance", ok, detail)


def quadrature_cross_checks(cfg):
    """Adaptive Gauss-Kronrod vs double-exponential rule on the solver's integrands."""
    from .kernels import continued_integrand, line_integrand

    cases = [
        ("exp(-t)", lambda t: np.exp(-t), 1.0),
        ("line coupling", lambda p: line_integrand(p, 2.0, 2.0, 1.5, 0.0), 0.5),
        ("line coupling, shifted", lambda p: line_integrand(p, 3.0, 1.5, 2.0, 0.7), 0.5),
        ("continued, below threshold", lambda p: continued_integrand(p, -3.0 + 0j, 3.0, 1.0, -0.75 + 0j, 0.0).real, 0.5),
        ("plane radial", lambda p: p * np.exp(-2.0 * np.sqrt(p * p + 4.0)) / ((2.0 * np.sqrt(p * p + 4.0) - 3.0) * np.sqrt(p * p + 4.0)), 0.5),
    ]
    out = []
    for name, f, scale in cases:
        gk = integrate_halfline(f, 0.0, cfg, scale=scale)
        de = integrate_de(f, 0.0)
        out.append((name, abs(complex(gk.value) - complex(de.value)), abs(complex(de.value))))
    g = integrate(lambda t: 1.0 / (1.0 + t * t), 0.0, 1.0, cfg)
    out.append(("1/(1+t^2) on [0,1]", abs(complex(g.value) - math.pi / 4), math.pi / 4))
    return out


def check_quadrature(settings=None):
    """Criterion 12 (numerical part): two-rule cross-checks to 1e-10."""
    rows = quadrature_cross_checks(_quad(settings))
    worst = max(d / max(1.0, ref) for _, d, ref in rows)
    return Check(12, "quadrature two-rule cross-checks", worst < 1e-10, f"max difference {worst:.1e} (< 1e-10)")


SETTINGS_LIMITS = {"quad_abs_tol": 1e-12, "quad_rel_tol": 1e-10, "pole_tol": 1e-10, "root_tol": 1e-8}


def check_solver_settings(cfg):
    """Configured tolerances must be tight enough to certify the criteria.

    The criteria assert agreement to 1e-10; a quadrature or pole target
    looser than that cannot back such a claim even when the computed
    numbers happen to be accurate.
    """
    bad = [f"{k} = {getattr(cfg.solver, k):g} > {v:g}" for k, v in SETTINGS_LIMITS.items() if getattr(cfg.solver, k) > v]
    return Check(0, "solver settings", not bad, "; ".join(bad) if bad else "tolerances admissible")


def check_configured_system(cfg):
    """Spectrum of the configured system: root count within ``[1, n]``, below threshold."""
    spec = cfg.system
    q = cfg.solver.quadrature()
    try:
        if spec.dimension == 2:
            res = find_eigenvalues(spec, tol=cfg.solver.root_tol, cfg=q)
        else:
            res = find_eigenvalues_3d(spec, tol=cfg.solver.root_tol, cfg=q)
    except Exception as err:  # reported, not raised
        return Check(0, "configured system", False, f"solver failed: {err}")
    ok = 1 <= res.count <= spec.n and all(e < spec.threshold() for e in res.energies)
    return Check(0, "configured system", ok, f"{res.count} level(s), energies {', '.join(f'{e:.8f}' for e in res.energies)}")


CHECKS_2D = (
    check_point_closed_forms,
    check_single_site_2d,
    check_krein_route,
    check_pair_factorization,
    check_continuation,
    check_single_resonance,
    check_scattering,
    check_coupling_break,
    check_distance_break,
    check_quadrature,
)
CHECKS_3D = (check_point_closed_forms, check_continuation, check_spectrum_3d, check_resonance_3d, check_quadrature)


def run_suite(cfg):
    """Run the checks for ``cfg.system.dimension``; exceptions count as failures."""
    checks = [check_solver_settings(cfg), check_configured_system(cfg)]
    for fn in CHECKS_2D if cfg.system.dimension == 2 else CHECKS_3D:
        try:
            checks.append(fn(cfg.solver))
        except Exception as err:
            num = int(fn.__doc__.split("Criterion ")[1].split()[0].rstrip(":"))
            checks.append(Check(num, fn.__name__.replace("check_", "").replace("_", " "), False, f"raised {type(err).__name__}: {err}"))
    return checks
