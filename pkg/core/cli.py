"""
efcap Command Line Interface
Console entry point: exponents, shoot, branch, singular, phase, eigen,
bounds, limit-p1 and verify
"""

import sys
import math
import logging
import argparse
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from config.config_manager import RunConfig, RunConfigManager

from .branch import default_point_count, theta_of_gamma, trace_branch, underline_theta_estimate
from .errors import (EFCapError, ConfigError, EXIT_ACCEPTANCE_FAILURE, EXIT_INVALID_INPUT,
                     EXIT_NUMERICAL_FAILURE, EXIT_OK, exit_code_for)
from .integrate import integrate_sphere_regular
from .model import classify, compute_exponents
from .phase import cap_orbit, equilibrium_report, flat_orbit, trapping_monitor
from .result_schema import create_result_v1, write_csv
from .singular import compute_theta_star, convergence_study, singular_residual
from .spectral import (bessel_frame, bessel_limit_check, gamma_dagger, gamma_p_trend, lambda1,
                       lambda1_closed_form_n3, nonexistence_bound_n3, nonexistence_certificate,
                       nonexistence_scan, pohozaev_trace, sup_F, theta_dagger)
from .verify import CheckResult, run_suite, suite_names

logger = logging.getLogger(__name__)

console = Console(stderr=True)


def setup_logging(level: str = "INFO") -> None:
    """Configure root logging on standard error"""
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def _human(value: Any, digits: int) -> str:
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


class Run:
    """Effective config plus the writers shared by every command"""

    def __init__(self, command: str, manager: RunConfigManager, suite: str = "all"):
        self.command = command
        self.manager = manager
        self.config: RunConfig = manager.config
        self.out_dir = Path(self.config.output.out_dir)
        self.suite = suite

    @property
    def artifacts(self) -> Dict[str, Any]:
        return self.manager.get_deterministic_artifacts()

    def diagnostics(self, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Command diagnostics plus the effective config the run used"""
        return dict(extra or {}, config=self.config.to_dict())

    def header(self) -> Dict[str, Any]:
        return {"N": self.config.model.N, "p": self.config.model.p, "config_hash": self.manager.config_hash}

    def table(self, frame: pd.DataFrame, name: str, kind: str) -> None:
        write_csv(frame, str(self.out_dir / f"{name}.csv"), kind, self.header(),
                  digits=self.config.output.machine_digits)

    def emit(self, summary: Dict[str, Any], params: Optional[Dict[str, Any]] = None,
             exponents: Optional[Dict[str, Any]] = None, diagnostics: Optional[Dict[str, Any]] = None,
             save: bool = True) -> None:
        """Full-precision record on stdout (and to disk), short summary on stderr"""
        record = create_result_v1(self.command, self.artifacts, params=params, exponents=exponents,
                                  summary=summary, diagnostics=self.diagnostics(diagnostics))
        if not record.validate_schema():
            logger.warning(f"Result record failed validation: {record.validation_errors}")
        machine = self.config.output.machine_digits
        if save:
            record.save_to_file(str(self.out_dir / f"{self.command}_result.json"), machine)
        print(record.to_json(machine))
        digits = self.config.output.summary_digits
        for key, value in record.summary.items():
            if not isinstance(value, (dict, list)):
                console.print(f"{key}: {_human(value, digits)}")


def cmd_exponents(run: Run) -> int:
    params = run.config.params()
    exp = compute_exponents(params)
    regime = classify(params)
    run.emit({"regime": regime.to_dict()}, params=params.to_dict(), exponents=exp.to_dict(), save=False)
    return EXIT_OK


def cmd_shoot(run: Run) -> int:
    params = run.config.params()
    cfg = run.config.integrator_config()
    Gamma = run.config.shoot.Gamma
    profile = integrate_sphere_regular(params, Gamma, cfg)
    point = theta_of_gamma(params, Gamma, cfg)
    trace = pohozaev_trace(params, profile)
    run.table(profile.to_frame(), f"profile_N{params.N}_p{params.p:g}", "profile")
    summary = {
        "Gamma": Gamma,
        "Theta": profile.first_zero,
        "R": point.R,
        "theta_error": profile.zero_error,
        "slope_sign": point.slope_sign,
        "dTheta_dGamma": point.dTheta_dGamma,
        "pohozaev": trace.summary(),
    }
    run.emit(summary, params=params.to_dict(), exponents=compute_exponents(params).to_dict())
    return EXIT_OK


def cmd_branch(run: Run) -> int:
    params = run.config.params()
    cfg = run.config.integrator_config()
    section = run.config.branch
    n_points = section.points or default_point_count(section.gamma_min, section.gamma_max,
                                                     section.points_per_decade)
    branch = trace_branch(params, section.gamma_min, section.gamma_max, n_points, cfg,
                          refine_width=section.refine_width, theta_star=section.theta_star or None,
                          dead_band=section.dead_band, progress=True)
    run.table(branch.to_frame(), f"branch_N{params.N}_p{params.p:g}", "branch")
    summary = branch.summary()
    failures = summary.pop("failures")
    if branch.points:
        estimate = underline_theta_estimate(branch)
        summary["theta_min_bracket"] = list(estimate.bracket)
    run.emit(summary, params=params.to_dict(), exponents=compute_exponents(params).to_dict(),
             diagnostics={"failures": failures})
    if failures:
        logger.error(f"{len(failures)} branch points failed; partial results written to {run.out_dir}")
        return EXIT_NUMERICAL_FAILURE
    return EXIT_OK


def cmd_singular(run: Run) -> int:
    params = run.config.params()
    cfg = run.config.integrator_config()
    section = run.config.singular
    sing = compute_theta_star(params, cfg, theta0=section.theta0, refinement_tol=section.refinement_tol)
    run.table(sing.profile.to_frame(), f"singular_N{params.N}_p{params.p:g}", "profile")
    study = convergence_study(params, section.gammas, r0=section.r0_fraction * sing.R_star, cfg=cfg,
                              singular=sing)
    summary = dict(sing.summary())
    summary["residual"] = singular_residual(sing)
    summary["convergence"] = [rec.__dict__ for rec in study.records]
    summary["distance_decreasing"] = study.distance_decreasing
    run.emit(summary, params=params.to_dict(), exponents=compute_exponents(params).to_dict())
    return EXIT_OK


def cmd_phase(run: Run) -> int:
    params = run.config.params()
    cfg = run.config.integrator_config()
    section = run.config.phase
    exp = compute_exponents(params)
    flat = flat_orbit(params, section.gamma_bar, cfg=cfg, start_magnitude=section.start_magnitude,
                      t_length=section.t_length)
    cap = cap_orbit(params, section.gamma, cfg=cfg, start_magnitude=section.start_magnitude)
    trapping = trapping_monitor(params, section.gamma, cfg=cfg, fraction=section.epsilon_fraction)
    run.table(flat.to_frame(), f"flat_orbit_N{params.N}_p{params.p:g}", "orbit")
    run.table(cap.to_frame(), f"cap_orbit_N{params.N}_p{params.p:g}", "orbit")
    y_end, z_end = flat.endpoint
    summary = {
        "endpoint_distance": math.hypot(y_end - 1.0, z_end),
        "J_max_increase": float(np.max(np.diff(flat.J_trace))),
        "equilibrium": equilibrium_report(exp, params.p).to_dict(),
        "trapping": trapping.to_dict(),
    }
    run.emit(summary, params=params.to_dict(), exponents=exp.to_dict())
    return EXIT_OK


def cmd_eigen(run: Run) -> int:
    N = run.config.model.N
    Theta = run.config.spectral.theta
    cfg = run.config.eigen_config()
    result = lambda1(N, Theta, cfg)
    run.table(result.phi_profile.to_frame(), f"eigen_N{N}", "profile")
    rows = bessel_limit_check(N, run.config.spectral.lambdas, cfg)
    run.table(bessel_frame(N, rows), f"bessel_N{N}", "bessel")
    summary = result.to_dict()
    if N == 3:
        summary["closed_form"] = lambda1_closed_form_n3(Theta)
    run.emit(summary, params={"N": N}, diagnostics={"eigen_config": cfg.to_dict()})
    return EXIT_OK


def cmd_bounds(run: Run) -> int:
    params = run.config.params()
    N, p = params.N, params.p
    spectral = run.config.spectral
    Theta = spectral.theta
    summary: Dict[str, Any] = {
        "Theta": Theta,
        "sup_F": sup_F(N, Theta, spectral.sup_samples),
        "certified": nonexistence_certificate(N, p, Theta, spectral.sup_samples, spectral.safety_margin),
    }
    if N == 3 and p >= 5.0:
        summary["bound_n3"] = nonexistence_bound_n3(p)
    thetas = np.linspace(0.05, math.pi - 0.05, spectral.scan_theta_points)
    scan = nonexistence_scan(N, [p], thetas, spectral.sup_samples, spectral.safety_margin)
    run.table(scan, f"scan_N{N}_p{p:g}", "scan")
    run.emit(summary, params=params.to_dict())
    return EXIT_OK


def cmd_limit_p1(run: Run) -> int:
    N = run.config.model.N
    cfg = run.config.integrator_config()
    eigen = run.config.eigen_config()
    spectral = run.config.spectral
    Theta_dagger = theta_dagger(N, eigen)
    trend = gamma_p_trend(N, spectral.theta, spectral.p_list, cfg)
    run.table(pd.DataFrame(trend, columns=["p", "Gamma"]), f"p_trend_N{N}", "p-trend")
    summary = {
        "Theta_dagger": Theta_dagger,
        "Gamma_dagger": gamma_dagger(N, eigen),
        "Theta": spectral.theta,
        "trend": [list(row) for row in trend],
    }
    run.emit(summary, params={"N": N}, diagnostics={"eigen_config": eigen.to_dict()})
    return EXIT_OK


def _results_table(results: List[CheckResult], title: str) -> Table:
    table = Table(title=title)
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Measured", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Detail")
    for result in results:
        table.add_row(
            result.name,
            "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]",
            f"{result.measured:.6g}",
            f"{result.tolerance:.6g}",
            result.detail,
        )
    return table


def cmd_verify(run: Run) -> int:
    suite = run.suite
    results = run_suite(suite, run.config.integrator_config())
    failed = [r.name for r in results if not r.passed]
    Console().print(_results_table(results, f"efcap verify --suite {suite}"))
    record = create_result_v1("verify", run.artifacts, summary={"suite": suite, "passed": not failed,
                                                                 "failed": failed},
                              diagnostics=run.diagnostics({"checks": [r.to_dict() for r in results]}))
    record.save_to_file(str(run.out_dir / "verify_result.json"), run.config.output.machine_digits)
    return EXIT_ACCEPTANCE_FAILURE if failed else EXIT_OK


COMMANDS: Dict[str, Callable[[Run], int]] = {
    "exponents": cmd_exponents,
    "shoot": cmd_shoot,
    "branch": cmd_branch,
    "singular": cmd_singular,
    "phase": cmd_phase,
    "eigen": cmd_eigen,
    "bounds": cmd_bounds,
    "limit-p1": cmd_limit_p1,
    "verify": cmd_verify,
}

# flag destination -> config key; --gamma feeds the command's own section
OVERRIDES = {
    "N": "model.N",
    "p": "model.p",
    "rel_tol": "integrator.rel_tol",
    "abs_tol": "integrator.abs_tol",
    "out": "output.out_dir",
    "log_level": "logging.log_level",
    "gamma_min": "branch.gamma_min",
    "gamma_max": "branch.gamma_max",
    "points": "branch.points",
    "theta_star": "branch.theta_star",
    "theta": "spectral.theta",
}

GAMMA_TARGET = {"shoot": "shoot.Gamma", "phase": "phase.gamma_bar"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="TOML config file (defaults to the packaged one)")
    common.add_argument("--log-level", dest="log_level", type=str, help="Logging level")
    common.add_argument("--out", type=str, help="Output directory")
    common.add_argument("--rel-tol", dest="rel_tol", type=float, help="Integrator relative tolerance")
    common.add_argument("--abs-tol", dest="abs_tol", type=float, help="Integrator absolute tolerance")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--N", type=int, help="Sphere dimension N >= 3")
    model.add_argument("--p", type=float, help="Exponent p > 1")

    dimension = argparse.ArgumentParser(add_help=False)
    dimension.add_argument("--N", type=int, help="Sphere dimension N >= 3")

    parser = argparse.ArgumentParser(prog="efcap", description="Emden-Fowler equation on spherical caps")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("exponents", parents=[common, model], help="Derived exponents and regime")

    shoot = subparsers.add_parser("shoot", parents=[common, model], help="One regular solution")
    shoot.add_argument("--gamma", type=float, help="Centre value Gamma = U(0)")

    branch = subparsers.add_parser("branch", parents=[common, model], help="Trace Theta(Gamma)")
    branch.add_argument("--gamma-min", dest="gamma_min", type=float, help="Smallest Gamma")
    branch.add_argument("--gamma-max", dest="gamma_max", type=float, help="Largest Gamma")
    branch.add_argument("--points", type=int, help="Grid points (default from points_per_decade)")
    branch.add_argument("--theta-star", dest="theta_star", type=float, help="Theta* for oscillation counts")

    subparsers.add_parser("singular", parents=[common, model], help="Singular solution and Theta*")

    phase = subparsers.add_parser("phase", parents=[common, model], help="Emden phase-plane orbits")
    phase.add_argument("--gamma", type=float, help="Flat centre value gamma_bar")

    eigen = subparsers.add_parser("eigen", parents=[common, dimension], help="First Dirichlet eigenvalue")
    eigen.add_argument("--theta", type=float, help="Cap radius Theta")

    bounds = subparsers.add_parser("bounds", parents=[common, model], help="Nonexistence certificates")
    bounds.add_argument("--theta", type=float, help="Cap radius Theta")

    limit = subparsers.add_parser("limit-p1", parents=[common, dimension], help="p -> 1 limits")
    limit.add_argument("--theta", type=float, help="Cap radius for the Gamma(p) trend")

    verify = subparsers.add_parser("verify", parents=[common], help="Acceptance suites")
    verify.add_argument("--suite", choices=suite_names(), default="all", help="Suite to run")

    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides = {key: getattr(args, dest, None) for dest, key in OVERRIDES.items()}
    if args.command in GAMMA_TARGET:
        overrides[GAMMA_TARGET[args.command]] = getattr(args, "gamma", None)
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI dispatcher"""
    args = build_parser().parse_args(argv)

    try:
        manager = RunConfigManager(args.config)
        manager.load_config()
        manager.apply_overrides(_overrides(args))
    except ConfigError as e:
        setup_logging("INFO")
        logger.error(str(e))
        return EXIT_INVALID_INPUT

    setup_logging(manager.config.logging.log_level)
    errors = manager.validate_config()
    if errors:
        for error in errors:
            logger.error(f"Invalid configuration: {error}")
        return EXIT_INVALID_INPUT

    run = Run(args.command, manager, getattr(args, "suite", "all"))
    try:
        return COMMANDS[args.command](run)
    except EFCapError as e:
        logger.error(f"{args.command} failed: {e}")
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
