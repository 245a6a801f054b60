"""
efcap Verify
Desk-scale acceptance suites: closed-form oracles plus property checks over
the branch, singular, phase and spectral computations
"""

import math
import logging
from dataclasses import dataclass, asdict
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .branch import default_point_count, scaled_gamma, slope_cross_check, trace_branch
from .errors import EFCapError, InvalidParamsError
from .integrate import IntegratorConfig, integrate_flat_regular, integrate_sphere_regular, to_stereographic
from .model import (Params, classify, compute_exponents, flat_singular_residual, joseph_lundgren_exponent,
                    sobolev_exponent)
from .phase import (equilibrium_report, flat_orbit, flat_singular_profile, intersection_count,
                    trapping_monitor)
from .singular import (asymptotic_decay_check, compute_theta_star, convergence_study, integrate_singular,
                       rescaled_distance, singular_residual)
from .spectral import (F_closed_form_n3, F_function, bessel_first_zero, bessel_limit_check,
                       closed_form_phi_n3, gamma_dagger, gamma_p_trend, lambda1, lambda1_closed_form_n3,
                       nonexistence_bound_n3, nonexistence_certificate, pohozaev_rate_check, pohozaev_trace,
                       psi0_residual, theta_dagger)

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _check(name: str, measured: float, tolerance: float, passed: Optional[bool] = None,
           detail: str = "") -> CheckResult:
    if passed is None:
        passed = bool(measured <= tolerance)
    result = CheckResult(name=name, passed=bool(passed), measured=float(measured),
                         tolerance=float(tolerance), detail=detail)
    log = logger.info if result.passed else logger.warning
    log(f"{'PASS' if result.passed else 'FAIL'} {name}: measured {measured:.6g}, tolerance {tolerance:.6g}")
    return result


def suite_exponents(cfg: IntegratorConfig) -> List[CheckResult]:
    worst = 0.0
    for N in range(3, 13):
        p_S = sobolev_exponent(N)
        for p in np.linspace(p_S, p_S + 10.0, 51)[1:]:
            exp = compute_exponents(Params(N, float(p)))
            identity = exp.m ** 2 * exp.mu * (N - 2.0 - exp.mu)
            worst = max(worst, abs(identity - 1.0))
    expected = 1.0 + 4.0 / (7.0 - 2.0 * math.sqrt(10.0))
    jl_error = abs(joseph_lundgren_exponent(11) - expected) / expected
    return [
        _check("m^2 mu (N-2-mu) = 1", worst, 1e-14, detail="N=3..12, 50 p per N"),
        _check("p_JL(11) closed form", jl_error, 1e-12),
    ]


def suite_flat_residual(cfg: IntegratorConfig) -> List[CheckResult]:
    rho = np.geomspace(0.1, 10.0, 1001)
    return [_check(f"flat singular residual N={N} p={p}", flat_singular_residual(Params(N, p), rho), 1e-10)
            for N, p in [(3, 7.0), (5, 4.0), (11, 8.0)]]


def suite_psi0(cfg: IntegratorConfig) -> List[CheckResult]:
    r = np.linspace(0.1, 10.0, 2001)
    return [_check(f"psi0 identity N={N}", psi0_residual(N, r), 1e-9) for N in (3, 4, 10)]


def suite_eigen_n3(cfg: IntegratorConfig) -> List[CheckResult]:
    errors = [abs(lambda1(3, Theta).lambda1 - lambda1_closed_form_n3(Theta))
              for Theta in (0.5, 1.0, 0.5 * math.pi, 2.0, 3.0)]
    ratio = lambda1(3, 0.1).lambda1 / lambda1(3, 3.0).lambda1
    return [
        _check("lambda1 closed form N=3", max(errors), 1e-8, detail="Theta in {0.5, 1, pi/2, 2, 3}"),
        _check("lambda1(0.1) > 100 lambda1(3.0)", ratio, 100.0, passed=ratio > 100.0),
    ]


def suite_critical_n3(cfg: IntegratorConfig) -> List[CheckResult]:
    results = suite_eigen_n3(cfg)
    params = Params(3, 5.0)
    gammas = np.geomspace(1e-3, 1e4, 60)
    thetas = np.array([integrate_sphere_regular(params, G, cfg).first_zero for G in gammas])
    steps = np.diff(thetas)
    top = thetas[-1]
    results.extend([
        _check("Theta(Gamma) strictly decreasing", float(np.max(steps)), 0.0, passed=bool(np.all(steps < 0.0))),
        _check("Theta(1e4) - pi/2", top - 0.5 * math.pi, 0.05,
               passed=0.5 * math.pi < top < 0.5 * math.pi + 0.05),
        _check("min Theta above pi/2", 0.5 * math.pi - float(thetas.min()), 0.0,
               passed=bool(np.all(thetas > 0.5 * math.pi))),
    ])
    return results


def suite_supercritical_n3(cfg: IntegratorConfig) -> List[CheckResult]:
    params = Params(3, 7.0)
    sing = compute_theta_star(params, cfg)
    Gamma_min, Gamma_max = 1e-1, 1e6
    branch = trace_branch(params, Gamma_min, Gamma_max, default_point_count(Gamma_min, Gamma_max),
                          cfg, theta_star=sing.Theta_star)
    checks = slope_cross_check(params, [1e-1, 1.0, 10.0, 1e3, 1e5], cfg)
    disagreements = sum(1 for c in checks if c.agrees is False)
    conclusive = sum(1 for c in checks if c.agrees is not None)
    return [
        _check("Theta* refinement", sing.refinement_estimate, 1e-6),
        _check("oscillations around Theta*", branch.oscillation_count, 2, passed=branch.oscillation_count >= 2),
        _check("turning brackets", len(branch.turning_points), 1, passed=len(branch.turning_points) >= 1),
        _check("variational slope sign vs finite differences", disagreements, 0,
               detail=f"{conclusive} of {len(checks)} points conclusive"),
    ]


def suite_phase(cfg: IntegratorConfig) -> List[CheckResult]:
    params = Params(3, 7.0)
    exp = compute_exponents(params)
    orbit = flat_orbit(params, 1.0, cfg=cfg)
    increase = float(np.max(np.diff(orbit.J_trace)))
    y_end, z_end = orbit.endpoint
    distance = math.hypot(y_end - 1.0, z_end)
    t_end = float(orbit.t[-1])
    start = math.log(1e-7 * exp.a) / (exp.m * exp.mu)
    finer = flat_orbit(params, 1.0, t_span=(start, t_end), cfg=cfg, start_magnitude=1e-7)
    shift = math.hypot(finer.endpoint[0] - y_end, finer.endpoint[1] - z_end)
    report = equilibrium_report(exp, params.p)
    spiral_ok = report.spiral and report.spiral == classify(params).spiral
    trapping = trapping_monitor(params, 1e8, cfg=cfg)
    return [
        _check("J nonincreasing", max(increase, 0.0), 1e-10),
        _check("J <= 0 after start", float(np.max(orbit.J_trace)), 1e-12),
        _check("endpoint distance to (1,0)", distance, 1e-4),
        _check("start magnitude 1e-7 vs 1e-6", shift, 1e-8),
        _check("equilibrium spiral", 0.0, 0.0, passed=spiral_ok),
        _check("trapping max H / 2eps", (trapping.max_H_after or 0.0) / (2.0 * trapping.eps), 1.0,
               passed=trapping.entered and not trapping.violated),
        _check("energy increase within bound", trapping.energy_increase or 0.0, trapping.energy_bound + 1e-8,
               passed=trapping.energy_ok),
    ]


def suite_intersections(cfg: IntegratorConfig) -> List[CheckResult]:
    params = Params(3, 7.0)
    counts = []
    for rho_max in (10.0, 1e2, 1e3):
        regular = integrate_flat_regular(params, 1.0, rho_max, cfg)
        singular = flat_singular_profile(params, regular.start, rho_max)
        counts.append(int(intersection_count(regular, singular, (0.01, rho_max))))
    singular_cap = to_stereographic(integrate_singular(params, 1e-9, cfg), params.N)
    cap_counts = []
    for gamma in (10.0, 1e4):
        regular = to_stereographic(integrate_sphere_regular(params, gamma / 2.0 ** params.k, cfg), params.N)
        top = min(regular.first_zero, singular_cap.first_zero)
        cap_counts.append(int(intersection_count(regular, singular_cap, (1e-8, top))))
    return [
        _check("flat counts nondecreasing in rho_max", 0.0, 0.0, passed=counts == sorted(counts),
               detail=f"counts {counts}"),
        _check("flat count at rho_max=1e3", counts[-1], 3, passed=counts[-1] >= 3),
        _check("cap count grows with gamma", cap_counts[1] - cap_counts[0], 1,
               passed=cap_counts[1] > cap_counts[0], detail=f"counts {cap_counts}"),
    ]


def suite_pohozaev(cfg: IntegratorConfig) -> List[CheckResult]:
    results = []
    for N, p, Gamma in [(3, 3.0, 1.0), (3, 5.0, 10.0), (4, 2.0, 2.0), (3, 7.0, 5.0)]:
        params = Params(N, p)
        trace = pohozaev_trace(params, integrate_sphere_regular(params, Gamma, cfg))
        worst = max(abs(trace.start_value), abs(trace.end_value)) / trace.scale
        results.append(_check(f"Pohozaev endpoints N={N} p={p} Gamma={Gamma}", worst, 1e-8))
    params = Params(3, 7.0)
    sing = compute_theta_star(params, cfg)
    trace = pohozaev_trace(params, sing.profile)
    rate = pohozaev_rate_check(params, sing.profile)
    theta = np.linspace(0.01, 2.0, 400)
    closed = np.max(np.abs(F_function(theta, 2.0, 3) - F_closed_form_n3(theta, 2.0)))
    results.extend([
        _check("Pohozaev H(Theta*) singular", abs(trace.end_value) / trace.scale, 1e-8),
        _check("singular H rate exponent", abs(rate.slope - rate.exponent), 1e-2),
        _check("singular H prefactor", abs(rate.prefactor_ratio - 1.0), 1e-2),
        _check("N=3 closed form of F", float(closed), 1e-10),
    ])
    return results


def suite_bounds(cfg: IntegratorConfig) -> List[CheckResult]:
    N, p = 3, 10.0
    bound = nonexistence_bound_n3(p)
    mismatches = 0
    for Theta in np.linspace(0.5, 3.1, 27):
        if abs(Theta - bound) > 1e-6 and nonexistence_certificate(N, p, Theta) != (Theta < bound):
            mismatches += 1
    branch = trace_branch(Params(N, p), 1e-1, 1e4, default_point_count(1e-1, 1e4), cfg)
    return [
        _check("certificate at Theta=2.0", 0.0, 0.0, passed=nonexistence_certificate(N, p, 2.0)),
        _check("no certificate at Theta=3.1", 0.0, 0.0, passed=not nonexistence_certificate(N, p, 3.1)),
        _check("certificate vs N=3 closed form", mismatches, 0),
        _check("theta_min above the bound", bound - 1e-6 - branch.theta_min, 0.0,
               detail=f"bound {bound:.6f}, theta_min {branch.theta_min:.6f}"),
    ]


def suite_limit_p1(cfg: IntegratorConfig) -> List[CheckResult]:
    N = 3
    target = math.pi / math.sqrt(2.0)
    shoot = theta_dagger(N)
    bisect = theta_dagger(N, method="bisect")
    p_list = [1.5, 1.2, 1.1, 1.05]
    below = [G for _, G in gamma_p_trend(N, 1.8, p_list, cfg)]
    above = [G for _, G in gamma_p_trend(N, 2.6, p_list, cfg)]
    at_dagger = gamma_p_trend(N, shoot, [1.05], cfg)[0][1]
    dagger = gamma_dagger(N)
    dagger_closed = gamma_dagger(N, phi=closed_form_phi_n3(target))
    identity = scaled_gamma(Params(N, 1.5), 1.8, lambda1(N, 1.8).lambda1, cfg)
    return [
        _check("Theta-dagger shoot", abs(shoot - target), 1e-8),
        _check("Theta-dagger bisect", abs(bisect - target), 1e-8),
        _check("Gamma(p) grows as p decreases below Theta-dagger", 0.0, 0.0,
               passed=all(b > a for a, b in zip(below[:-1], below[1:])), detail=f"{below}"),
        _check("Gamma(p) shrinks as p decreases above Theta-dagger", 0.0, 0.0,
               passed=all(b < a for a, b in zip(above[:-1], above[1:])), detail=f"{above}"),
        _check("Gamma(1.05) vs Gamma-dagger", abs(at_dagger - dagger) / dagger, 0.2),
        _check("Gamma-dagger closed-form phi", abs(dagger - dagger_closed) / dagger_closed, 1e-6),
        _check("scaling identity Gamma = lambda1^(1/(p-1)) Gamma1", abs(identity - below[0]) / below[0], 1e-6),
    ]


def suite_bessel(cfg: IntegratorConfig) -> List[CheckResult]:
    N = 3
    target = bessel_first_zero(0.5 * N - 1.0)
    rows = bessel_limit_check(N, [1e2, 1e3, 1e4])
    errors = [abs(product - target) for _, product in rows]
    return [
        _check("2 sqrt(lambda) r1 at lambda=1e4", errors[-1], 0.05),
        _check("Bessel error decays", 0.0, 0.0, passed=errors[0] > errors[1] > errors[2], detail=f"{errors}"),
    ]


def suite_singular_convergence(cfg: IntegratorConfig) -> List[CheckResult]:
    params = Params(3, 7.0)
    exp = compute_exponents(params)
    sing = compute_theta_star(params, cfg)
    study = convergence_study(params, [10.0 ** k for k in range(1, 6)], cfg=cfg, singular=sing)
    distances = [rec.sup_distance for rec in study.records]
    rate = asymptotic_decay_check(sing, exp)
    near, far = rescaled_distance(params, 10.0, cfg=cfg), rescaled_distance(params, 1e3, cfg=cfg)
    return [
        _check("sup distance decreasing along gamma", 0.0, 0.0,
               passed=all(b < a for a, b in zip(distances[:-1], distances[1:])), detail=f"{distances}"),
        _check("|R(1e5) - R*|", study.records[-1].zero_gap, 1e-2),
        _check("singular residual", singular_residual(sing), 1e-6),
        _check("asymptotic decay rate vs 2m", abs(rate / (2.0 * exp.m) - 1.0), 2e-2),
        _check("blow-up rescaling improves with gamma", far, near,
               passed=far < near and near > 100.0 * cfg.rel_tol, detail=f"noise floor {100.0 * cfg.rel_tol:.1e}"),
    ]


SUITES: Dict[str, Callable[[IntegratorConfig], List[CheckResult]]] = {
    "exponents": suite_exponents,
    "flat-residual": suite_flat_residual,
    "psi0": suite_psi0,
    "eigen-n3": suite_eigen_n3,
    "critical-n3": suite_critical_n3,
    "supercritical-n3": suite_supercritical_n3,
    "phase": suite_phase,
    "intersections": suite_intersections,
    "pohozaev": suite_pohozaev,
    "bounds": suite_bounds,
    "limit-p1": suite_limit_p1,
    "bessel": suite_bessel,
    "singular-convergence": suite_singular_convergence,
}


def suite_names() -> List[str]:
    return list(SUITES) + ["all"]


def run_suite(name: str, cfg: Optional[IntegratorConfig] = None) -> List[CheckResult]:
    """Run one suite, or every suite for "all"

    A numerical failure inside a suite becomes a failed check instead of
    aborting the remaining suites.
    """
    cfg = cfg or IntegratorConfig()
    if name not in SUITES and name != "all":
        raise InvalidParamsError(f"unknown suite {name!r}; choose from {suite_names()}")
    names = list(SUITES) if name == "all" else [name]
    results: List[CheckResult] = []
    for suite in names:
        logger.info(f"Running suite {suite}")
        try:
            results.extend(SUITES[suite](cfg))
        except EFCapError as e:
            logger.error(f"Suite {suite} aborted: {e}")
            results.append(CheckResult(name=f"{suite}: aborted", passed=False, measured=float("nan"),
                                       tolerance=float("nan"), detail=str(e)))
    return results
