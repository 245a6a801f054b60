"""
efcap: the Emden-Fowler equation on spherical caps of S^N
"""

__version__ = "0.1.0"
__author__ = "efcap developers"

from .errors import (EFCapError, InvalidParamsError, ConfigError, OutOfRangeError, IntegrationError,
                     ConvergenceError)
from .model import (Params, Exponents, Regime, Criticality, JLPosition, compute_exponents, classify,
                    cap_coefficients, stereographic_u_from_U, sphere_U_from_u, emden_from_u, flat_singular)
from .integrate import (IntegratorConfig, RadialProfile, ProfileKind, integrate_sphere_regular,
                        integrate_flat_regular, integrate_sphere_linear, integrate_variational,
                        to_stereographic)
from .branch import Branch, BranchPoint, theta_of_gamma, trace_branch, oscillation_count, gamma_of_theta
from .singular import SingularProfile, compute_theta_star, convergence_study
from .phase import (PhaseOrbit, EquilibriumReport, flat_orbit, cap_orbit, lyapunov_J, energy_E,
                    equilibrium_report, intersection_count)
from .spectral import (EigenResult, PohozaevTrace, lambda1, bessel_limit_check, rayleigh_check,
                       psi0_residual, pohozaev_trace, nonexistence_certificate, theta_dagger, gamma_dagger,
                       gamma_p_trend)
from .result_schema import ResultRecordV1, ResultValidator, create_result_v1

__all__ = [
    "EFCapError", "InvalidParamsError", "ConfigError", "OutOfRangeError", "IntegrationError",
    "ConvergenceError",
    "Params", "Exponents", "Regime", "Criticality", "JLPosition", "compute_exponents", "classify",
    "cap_coefficients", "stereographic_u_from_U", "sphere_U_from_u", "emden_from_u", "flat_singular",
    "IntegratorConfig", "RadialProfile", "ProfileKind", "integrate_sphere_regular", "integrate_flat_regular",
    "integrate_sphere_linear", "integrate_variational", "to_stereographic",
    "Branch", "BranchPoint", "theta_of_gamma", "trace_branch", "oscillation_count", "gamma_of_theta",
    "SingularProfile", "compute_theta_star", "convergence_study",
    "PhaseOrbit", "EquilibriumReport", "flat_orbit", "cap_orbit", "lyapunov_J", "energy_E",
    "equilibrium_report", "intersection_count",
    "EigenResult", "PohozaevTrace", "lambda1", "bessel_limit_check", "rayleigh_check", "psi0_residual",
    "pohozaev_trace", "nonexistence_certificate", "theta_dagger", "gamma_dagger", "gamma_p_trend",
    "ResultRecordV1", "ResultValidator", "create_result_v1",
    "__version__",
]
