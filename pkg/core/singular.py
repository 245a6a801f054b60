"""
efcap Singular
The singular solution U* from its asymptotics at the pole, Θ* with start
refinement, and convergence of regular solutions towards it
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, InvalidParamsError
from .integrate import (IntegratorConfig, RadialProfile, integrate_flat_regular,
                        integrate_sphere_regular, integrate_sphere_singular, to_stereographic)
from .model import Exponents, Params, compute_exponents, emden_from_u, sobolev_exponent, stereographic_u_from_U

logger = logging.getLogger(__name__)


@dataclass
class SingularProfile:
    params: Params
    theta_start: float
    profile: RadialProfile
    Theta_star: float
    R_star: float
    refinement_estimate: float
    raw_zeros: List[float] = field(default_factory=list)
    observed_order: Optional[float] = None

    def summary(self) -> Dict[str, Any]:
        return {
            "Theta_star": self.Theta_star,
            "R_star": self.R_star,
            "refinement_estimate": self.refinement_estimate,
            "theta_start": self.theta_start,
            "raw_zeros": list(self.raw_zeros),
            "observed_order": self.observed_order,
        }


def _supercritical(params: Params, what: str) -> Exponents:
    exp = compute_exponents(params)
    if not (exp.alpha is not None and exp.alpha > 0.0):
        raise InvalidParamsError(f"{what} needs p > p_S = {sobolev_exponent(params.N):.6g}, got p={params.p}")
    return exp


def singular_start_values(params: Params, theta0: float) -> Tuple[float, float]:
    """Leading-order U*(θ0) and U*'(θ0) from the asymptotics at the pole"""
    exp = _supercritical(params, "singular_start_values")
    if not (0.0 < theta0 <= 1e-2):
        raise InvalidParamsError("theta0 must lie in (0, 1e-2]")
    N, a, mu = params.N, exp.a, exp.mu
    half = 0.5 * theta0
    c, s, tan2 = math.cos(half), math.sin(half), 2.0 * math.tan(half)
    U0 = a * c ** -(N - 2) * tan2 ** -mu
    dU0 = a * c ** -N * tan2 ** (-mu - 1.0) * (-mu + (N - 2) * s * s)
    return U0, dU0


def integrate_singular(params: Params, theta0: float, cfg: Optional[IntegratorConfig] = None) -> RadialProfile:
    U0, dU0 = singular_start_values(params, theta0)
    return integrate_sphere_singular(params, theta0, U0, dU0, cfg)


def compute_theta_star(params: Params, cfg: Optional[IntegratorConfig] = None, theta0: float = 1e-4,
                       refinement_tol: float = 1e-6) -> SingularProfile:
    """Θ* from starts at θ0, θ0/2, θ0/4 with Richardson extrapolation

    The order is read off the two successive differences; when they do not
    shrink (noise floor reached) the finest value is reported unchanged.
    """
    cfg = cfg or IntegratorConfig()
    runs = [integrate_singular(params, theta0 / 2 ** i, cfg) for i in range(3)]
    zeros = [run.first_zero for run in runs]
    d1, d2 = zeros[1] - zeros[0], zeros[2] - zeros[1]
    if not abs(d2) <= refinement_tol:
        raise ConvergenceError(f"Theta* refinements disagree by {abs(d2):.3e} > {refinement_tol:.1e}; "
                               "reduce theta0 or tighten the integrator")

    extrapolated, order = zeros[2], None
    if d2 != 0.0 and d1 / d2 > 1.0:
        order = math.log2(d1 / d2)
        extrapolated = zeros[2] + d2 / (2.0 ** order - 1.0)
    Theta_star = extrapolated
    logger.info(f"Theta* = {Theta_star:.12g} for N={params.N}, p={params.p} "
                f"(refinement {abs(d1):.2e}, order {order})")
    return SingularProfile(params=params, theta_start=theta0 / 4, profile=runs[2], Theta_star=Theta_star,
                           R_star=math.tan(0.5 * Theta_star), refinement_estimate=abs(d1),
                           raw_zeros=zeros, observed_order=order)


def singular_residual(sing: SingularProfile, n_samples: int = 2000) -> float:
    """Pointwise residual of U* in the sphere equation on [2θ_start, Θ* - 1e-6]

    U*'' is the centred difference of the dense U*'. Each residual is
    measured against the largest of the three terms at that point.
    """
    N, p = sing.params.N, sing.params.p
    profile = sing.profile
    theta = np.geomspace(2.0 * profile.start, profile.first_zero - 1e-6, n_samples)
    h = 1e-6 * theta
    _, d_plus = profile.evaluate(theta + h)
    _, d_minus = profile.evaluate(theta - h)
    U, dU = profile.evaluate(theta)
    second = (d_plus - d_minus) / (2.0 * h)
    friction = (N - 1) * np.cos(theta) / np.sin(theta) * dU
    power = np.sign(U) * np.abs(U) ** p
    scale = np.maximum.reduce([np.abs(second), np.abs(friction), np.abs(power)])
    return float(np.max(np.abs(second + friction + power) / scale))


def asymptotic_decay_check(sing: SingularProfile, exp: Exponents, offset: float = 30.0,
                           upper: float = 1e-2, n_samples: int = 200) -> float:
    """Least-squares slope of log|y*(t) - 1| against t near t = -∞

    The window starts ``offset`` times beyond the start radius and ends
    where |y* - 1| first reaches ``upper``.
    """
    profile = sing.profile
    theta = np.geomspace(profile.start, 0.5 * profile.first_zero, 4000)
    U, _ = profile.evaluate(theta)
    r, u = stereographic_u_from_U(theta, U, sing.params.N)
    t, y = emden_from_u(r, u, exp)
    deviation = np.abs(y - 1.0)

    t_low = t[0] + math.log(offset) / exp.m
    above = np.nonzero((deviation >= upper) & (t > t_low))[0]
    t_high = t[above[0]] if above.size else t[-1]
    if t_high - t_low < 1.0 / exp.m:
        raise InvalidParamsError("asymptotic window too short; use a smaller theta_start")

    window = np.linspace(t_low, t_high, n_samples)
    log_dev = np.interp(window, t, np.log(np.maximum(deviation, 1e-300)))
    slope, _ = np.polyfit(window, log_dev, 1)
    logger.info(f"Fitted decay rate {slope:.6g} against 2m = {2.0 * exp.m:.6g}")
    return float(slope)


@dataclass
class ConvergenceRecord:
    gamma: float
    sup_distance: float
    zero_gap: float
    below_singular_at_r0: bool


@dataclass
class ConvergenceStudy:
    records: List[ConvergenceRecord]
    r0: float
    R_star: float
    distance_decreasing: bool
    gap_decreasing: bool


def eventually_decreasing(values: Sequence[float], tail: int = 3) -> bool:
    """True when the last ``tail`` entries strictly decrease"""
    tail_values = list(values)[-tail:]
    return all(b < a for a, b in zip(tail_values[:-1], tail_values[1:]))


def convergence_study(params: Params, gamma_list: Sequence[float], r0: Optional[float] = None,
                      cfg: Optional[IntegratorConfig] = None, singular: Optional[SingularProfile] = None,
                      n_samples: int = 2001) -> ConvergenceStudy:
    """Distance between u(·, γ) and u* on [r0, min(R(γ), R*)] along gamma_list"""
    cfg = cfg or IntegratorConfig()
    if list(gamma_list) != sorted(gamma_list):
        raise InvalidParamsError("gamma_list must be increasing")
    singular = singular or compute_theta_star(params, cfg)
    u_star = to_stereographic(singular.profile, params.N)
    R_star = u_star.first_zero
    r0 = 0.5 * R_star if r0 is None else r0
    if not (0.0 < r0 < R_star):
        raise InvalidParamsError("r0 must lie in (0, R*)")

    records = []
    for gamma in gamma_list:
        Gamma = gamma / 2.0 ** params.k
        regular = to_stereographic(integrate_sphere_regular(params, Gamma, cfg), params.N)
        R = regular.first_zero
        top = min(R, R_star)
        distance = float("nan")
        if top > r0:
            r = np.linspace(r0, top, n_samples)
            distance = float(np.max(np.abs(regular.evaluate(r)[0] - u_star.evaluate(r)[0])))
        below = bool(regular.evaluate(r0)[0][0] < u_star.evaluate(r0)[0][0])
        records.append(ConvergenceRecord(gamma=float(gamma), sup_distance=distance,
                                         zero_gap=abs(R - R_star), below_singular_at_r0=below))
        logger.info(f"gamma={gamma:.3g}: sup distance {distance:.3e}, |R - R*| = {abs(R - R_star):.3e}")

    return ConvergenceStudy(records=records, r0=r0, R_star=R_star,
                            distance_decreasing=eventually_decreasing([rec.sup_distance for rec in records]),
                            gap_decreasing=eventually_decreasing([rec.zero_gap for rec in records]))


def rescaled_distance(params: Params, gamma: float, rho_max: float = 10.0,
                      cfg: Optional[IntegratorConfig] = None, n_samples: int = 2001) -> float:
    """sup |u(r)/γ - ū(ρ, 1)| with ρ = v0^{(p-1)/2} r and v0 = 2^{-q/(p-1)} γ

    Near the pole the cap equation is the flat one with coefficient 2^{-q},
    so the blown-up regular solution approaches the flat solution with
    centre value 1 as γ grows.
    """
    cfg = cfg or IntegratorConfig()
    exp = compute_exponents(params)
    p = params.p
    v0 = 2.0 ** (-exp.q / (p - 1.0)) * gamma
    stretch = v0 ** (0.5 * (p - 1.0))
    regular = to_stereographic(integrate_sphere_regular(params, gamma / 2.0 ** params.k, cfg), params.N)
    flat = integrate_flat_regular(params, 1.0, rho_max, cfg)
    rho_top = min(rho_max, stretch * regular.first_zero)
    rho = np.linspace(max(rho_top * 1e-3, flat.start, stretch * regular.start), rho_top, n_samples)
    scaled = regular.evaluate(rho / stretch)[0] / gamma
    return float(np.max(np.abs(scaled - flat.evaluate(rho)[0])))
