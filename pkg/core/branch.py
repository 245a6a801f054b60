"""
efcap Branch
The bifurcation map Γ -> Θ(Γ): tracing, turning points, oscillation around
Θ* and inversion in the subcritical regime
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import brentq, minimize_scalar
from tqdm import tqdm

from .errors import ConvergenceError, IntegrationError, InvalidParamsError, OutOfRangeError
from .integrate import IntegratorConfig, integrate_sphere_regular, integrate_variational, stereographic_radius
from .model import Params, is_critical, sobolev_exponent

logger = logging.getLogger(__name__)

# Γ search window for gamma_of_theta
LOG_GAMMA_LIMIT = math.log(1e60)


@dataclass
class BranchPoint:
    Gamma: float
    gamma: float
    Theta: float
    R: float
    slope_sign: int
    w_end: float
    u_r_end: float = float("nan")
    dTheta_dGamma: float = float("nan")
    theta_error: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "Gamma": self.Gamma, "gamma": self.gamma, "Theta": self.Theta, "R": self.R,
            "slope_sign": self.slope_sign, "w_end": self.w_end,
        }


@dataclass
class Branch:
    params: Params
    points: List[BranchPoint]
    turning_points: List[Tuple[float, float]] = field(default_factory=list)
    theta_min: float = float("nan")
    theta_min_gamma: float = float("nan")
    oscillation_count: Optional[int] = None
    theta_star: Optional[float] = None
    failures: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([pt.Gamma for pt in self.points])

    @property
    def thetas(self) -> np.ndarray:
        return np.array([pt.Theta for pt in self.points])

    def to_frame(self) -> pd.DataFrame:
        columns = ["Gamma", "gamma", "Theta", "R", "slope_sign", "w_end"]
        return pd.DataFrame([pt.to_dict() for pt in self.points], columns=columns)

    def summary(self) -> Dict[str, Any]:
        return {
            "n_points": len(self.points),
            "turning_points": [list(bracket) for bracket in self.turning_points],
            "theta_min": self.theta_min,
            "theta_min_gamma": self.theta_min_gamma,
            "oscillation_count": self.oscillation_count,
            "theta_star": self.theta_star,
            "single_valued_above": single_valued_threshold(self) if self.points else None,
            "failures": self.failures,
        }


def _sign(value: float, floor: float) -> int:
    if abs(value) <= floor:
        return 0
    return 1 if value > 0 else -1


def theta_of_gamma(params: Params, Gamma: float, cfg: Optional[IntegratorConfig] = None) -> BranchPoint:
    """Θ(Γ) from the sphere frame, slope data from the variational equation

    dΘ/dΓ = -W(Θ)/U'(Θ) equals 2^{N/2} R'/(1 + R²) with R' = -w(R)/u_r(R);
    the θ-frame form stays finite when Θ sits next to the antipode.
    """
    cfg = cfg or IntegratorConfig()
    profile = integrate_sphere_regular(params, Gamma, cfg)
    u_profile, _, w_end = integrate_variational(params, Gamma, cfg)
    Theta = profile.first_zero
    U_theta, W_end = u_profile.meta["U_theta_end"], u_profile.meta["W_end"]
    slope = -W_end / U_theta
    return BranchPoint(Gamma=float(Gamma), gamma=2.0 ** params.k * Gamma, Theta=Theta,
                       R=stereographic_radius(Theta, profile.zero_gap),
                       slope_sign=_sign(slope, 10.0 * cfg.abs_tol / abs(U_theta)), w_end=w_end,
                       u_r_end=u_profile.end_derivative, dTheta_dGamma=slope, theta_error=profile.zero_error)


def default_point_count(Gamma_min: float, Gamma_max: float, per_decade: int = 20) -> int:
    decades = math.log10(Gamma_max / Gamma_min)
    return max(2, int(math.ceil(decades * per_decade)) + 1)


def _evaluate(params: Params, Gamma: float, cfg: IntegratorConfig,
              failures: List[Dict[str, Any]]) -> Optional[BranchPoint]:
    try:
        return theta_of_gamma(params, Gamma, cfg)
    except IntegrationError as e:
        logger.warning(f"Branch point Gamma={Gamma:.6g} failed: {e}")
        failures.append({"Gamma": float(Gamma), "error": str(e)})
        return None


def _refine_turning(params: Params, low: BranchPoint, high: BranchPoint, cfg: IntegratorConfig,
                    refine_width: float, failures: List[Dict[str, Any]]
                    ) -> Tuple[Tuple[float, float], List[BranchPoint]]:
    inserted = []
    while math.log(high.Gamma / low.Gamma) > refine_width:
        middle = _evaluate(params, math.sqrt(low.Gamma * high.Gamma), cfg, failures)
        if middle is None:
            break
        inserted.append(middle)
        if middle.slope_sign == 0:
            # slope vanishes at the midpoint: shrink towards the sign carried by `high`
            low = middle
        elif middle.slope_sign == low.slope_sign:
            low = middle
        else:
            high = middle
    return (low.Gamma, high.Gamma), inserted


def trace_branch(params: Params, Gamma_min: float, Gamma_max: float, n_points: int,
                 cfg: Optional[IntegratorConfig] = None, refine_width: float = 1e-4,
                 theta_star: Optional[float] = None, dead_band: float = 1e-9,
                 progress: bool = False) -> Branch:
    """Sample Θ(Γ) on a log grid and bracket every sign change of the slope

    Failed points are skipped and reported in ``Branch.failures``.
    """
    cfg = cfg or IntegratorConfig()
    if not (0.0 < Gamma_min < Gamma_max):
        raise InvalidParamsError("need 0 < Gamma_min < Gamma_max")
    if n_points < 2:
        raise InvalidParamsError("n_points must be >= 2")

    failures: List[Dict[str, Any]] = []
    grid = np.geomspace(Gamma_min, Gamma_max, int(n_points))
    iterator = tqdm(grid, desc="branch", unit="pt", disable=not progress)
    points = [pt for pt in (_evaluate(params, G, cfg, failures) for G in iterator) if pt is not None]
    logger.info(f"Evaluated {len(points)}/{len(grid)} grid points for N={params.N}, p={params.p}")

    turning: List[Tuple[float, float]] = []
    refined: List[BranchPoint] = []
    signed = [pt for pt in points if pt.slope_sign != 0]
    for left, right in zip(signed[:-1], signed[1:]):
        if left.slope_sign != right.slope_sign:
            bracket, extra = _refine_turning(params, left, right, cfg, refine_width, failures)
            turning.append(bracket)
            refined.extend(extra)
            logger.info(f"Turning point bracketed in Gamma in [{bracket[0]:.8g}, {bracket[1]:.8g}]")

    merged: Dict[float, BranchPoint] = {pt.Gamma: pt for pt in points + refined}
    ordered = [merged[G] for G in sorted(merged)]
    branch = Branch(params=params, points=ordered, turning_points=turning, failures=failures)
    if ordered:
        lowest = min(ordered, key=lambda pt: pt.Theta)
        branch.theta_min, branch.theta_min_gamma = lowest.Theta, lowest.Gamma
    if theta_star is not None:
        branch.theta_star = theta_star
        branch.oscillation_count = oscillation_count(branch, theta_star, dead_band)
    return branch


def oscillation_count(branch: Union[Branch, Sequence[float]], theta_star: float,
                      dead_band: float = 1e-9) -> int:
    """Sign changes of Θ(Γ_i) - Θ* along the branch, ignoring the dead band"""
    if not (0.0 < theta_star < math.pi):
        raise InvalidParamsError("theta_star must lie in (0, pi)")
    thetas = branch.thetas if isinstance(branch, Branch) else np.asarray(branch, dtype=float)
    offsets = thetas - theta_star
    signs = np.sign(offsets[np.abs(offsets) > dead_band])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass
class ThetaMinEstimate:
    """Smallest computed Θ, an upper estimate of the infimum over all Γ"""
    theta_min: float
    Gamma: float
    bracket: Tuple[float, float]


def underline_theta_estimate(branch: Branch, refine: bool = False,
                             cfg: Optional[IntegratorConfig] = None) -> ThetaMinEstimate:
    if not branch.points:
        raise InvalidParamsError("empty branch")
    index = int(np.argmin(branch.thetas))
    points = branch.points
    low = points[max(index - 1, 0)].Gamma
    high = points[min(index + 1, len(points) - 1)].Gamma
    estimate = ThetaMinEstimate(points[index].Theta, points[index].Gamma, (low, high))
    if not refine or low == high or index in (0, len(points) - 1):
        return estimate

    cfg = cfg or IntegratorConfig()

    def theta_at(log_gamma):
        return integrate_sphere_regular(branch.params, math.exp(log_gamma), cfg).first_zero

    result = minimize_scalar(theta_at, bounds=(math.log(low), math.log(high)), method="bounded",
                             options={"xatol": 1e-6})
    if result.success and result.fun < estimate.theta_min:
        return ThetaMinEstimate(float(result.fun), math.exp(result.x), (low, high))
    return estimate


def single_valued_threshold(branch: Branch) -> float:
    """Largest computed Θ above which each Θ is attained by one sampled Γ

    Beyond the first turning point the branch folds back; everything above
    the largest Θ reached after that point is covered once. A monotone branch
    is single-valued everywhere and reports its own minimum.
    """
    if not branch.turning_points:
        return branch.theta_min
    first_turn = branch.turning_points[0][0]
    tail = [pt.Theta for pt in branch.points if pt.Gamma >= first_turn]
    return max(tail) if tail else branch.theta_min


@dataclass
class SlopeCheck:
    Gamma: float
    slope_sign: int
    dTheta_dGamma: float
    fd_slope: float
    fd_error: float
    agrees: Optional[bool]


def slope_cross_check(params: Params, Gammas: Sequence[float], cfg: Optional[IntegratorConfig] = None,
                      rel_step: float = 1e-3, significance: float = 10.0) -> List[SlopeCheck]:
    """Compare the variational slope sign with centred differences of Θ(Γ)

    ``agrees`` is None where the difference does not exceed ``significance``
    times its error estimate.
    """
    cfg = cfg or IntegratorConfig()
    checks = []
    for Gamma in Gammas:
        point = theta_of_gamma(params, Gamma, cfg)
        plus = integrate_sphere_regular(params, Gamma * (1.0 + rel_step), cfg)
        minus = integrate_sphere_regular(params, Gamma * (1.0 - rel_step), cfg)
        step = 2.0 * rel_step * Gamma
        fd = (plus.first_zero - minus.first_zero) / step
        fd_error = (plus.zero_error + minus.zero_error) / step
        agrees = None
        if abs(fd) > significance * fd_error and point.slope_sign != 0:
            agrees = (fd > 0) == (point.slope_sign > 0)
        checks.append(SlopeCheck(Gamma=float(Gamma), slope_sign=point.slope_sign,
                                 dTheta_dGamma=point.dTheta_dGamma, fd_slope=fd,
                                 fd_error=fd_error, agrees=agrees))
    return checks


def gamma_of_theta(params: Params, Theta_target: float, cfg: Optional[IntegratorConfig] = None,
                   coefficient: float = 1.0, rtol: float = 1e-10) -> float:
    """The unique Γ with Θ(Γ) = Theta_target for 1 < p <= p_S

    Bisection (Brent) on log Γ; the bracket is widened from [1e-2, 1e2]
    by factors of 100 until it straddles the target.
    """
    cfg = cfg or IntegratorConfig()
    if not (is_critical(params) or params.p < sobolev_exponent(params.N)):
        raise InvalidParamsError(f"gamma_of_theta needs 1 < p <= p_S, got p={params.p}")
    if not (0.0 < Theta_target < math.pi):
        raise InvalidParamsError("Theta_target must lie in (0, pi)")
    if params.N == 3 and is_critical(params) and Theta_target <= 0.5 * math.pi:
        raise OutOfRangeError("N=3, p=5 has no regular solution for Theta <= pi/2")

    def offset(log_gamma: float) -> float:
        profile = integrate_sphere_regular(params, math.exp(log_gamma), cfg, coefficient=coefficient)
        return profile.first_zero - Theta_target

    low, high = math.log(1e-2), math.log(1e2)
    f_low, f_high = offset(low), offset(high)
    # Θ decreases in Γ: need f(low) > 0 > f(high)
    while f_low <= 0.0:
        if low <= -LOG_GAMMA_LIMIT:
            raise OutOfRangeError(f"Theta_target={Theta_target} above the attained range")
        high, f_high = low, f_low
        low = max(low - math.log(100.0), -LOG_GAMMA_LIMIT)
        f_low = offset(low)
    while f_high >= 0.0:
        if high >= LOG_GAMMA_LIMIT:
            raise OutOfRangeError(f"Theta_target={Theta_target} below the attained range")
        low, f_low = high, f_high
        high = min(high + math.log(100.0), LOG_GAMMA_LIMIT)
        f_high = offset(high)

    try:
        root = brentq(offset, low, high, xtol=rtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    except RuntimeError as e:
        raise ConvergenceError(f"gamma_of_theta did not converge: {e}")
    Gamma = math.exp(root)
    logger.info(f"Gamma(Theta={Theta_target:.8g}) = {Gamma:.10g} for N={params.N}, p={params.p}")
    return Gamma


def scaled_gamma(params: Params, Theta: float, lambda1: float,
                 cfg: Optional[IntegratorConfig] = None) -> float:
    """λ1^{1/(p-1)} Γ1, where W'' + (N-1)cot W' + λ1 W^p = 0 has first zero Θ at W(0) = Γ1"""
    Gamma1 = gamma_of_theta(params, Theta, cfg, coefficient=lambda1)
    return lambda1 ** (1.0 / (params.p - 1.0)) * Gamma1
