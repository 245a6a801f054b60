"""
efcap Phase
Emden phase-plane orbits (flat and cap), Lyapunov and energy traces,
sublevel trapping, equilibrium classification and intersection numbers
"""

import cmath
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from .errors import InvalidParamsError
from .integrate import IntegratorConfig, ProfileKind, RadialProfile, signed_power, solve_system
from .model import Exponents, Params, cap_coefficients, compute_exponents, flat_singular

logger = logging.getLogger(__name__)


@dataclass
class PhaseOrbit:
    t: np.ndarray
    y: np.ndarray
    z: np.ndarray
    J_trace: np.ndarray
    E_trace: Optional[np.ndarray] = None
    H_trace: Optional[np.ndarray] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def endpoint(self) -> Tuple[float, float]:
        return float(self.y[-1]), float(self.z[-1])

    def to_frame(self) -> pd.DataFrame:
        E = self.E_trace if self.E_trace is not None else np.full_like(self.t, np.nan)
        return pd.DataFrame({"t": self.t, "y": self.y, "z": self.z, "J": self.J_trace, "E": E})


def lyapunov_J(y, z, p: float):
    """J(y, z) = z²/2 - y²/2 + |y|^{p+1}/(p+1)"""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    value = 0.5 * z * z - 0.5 * y * y + np.abs(y) ** (p + 1.0) / (p + 1.0)
    return float(value) if value.ndim == 0 else value


def hamiltonian_H(y, z, p: float):
    """H(y, z) = z²/2 - (y² - 1)/2 + (|y|^{p+1} - 1)/(p+1), zero at (1, 0)"""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    value = 0.5 * z * z - 0.5 * (y * y - 1.0) + (np.abs(y) ** (p + 1.0) - 1.0) / (p + 1.0)
    return float(value) if value.ndim == 0 else value


def energy_E(y, z, t, exp: Exponents, N: int):
    """E = H + B0 y^{p+1}/(p+1) + m² B1 y²/2 for the cap system"""
    p = exp.p
    B0, B1 = cap_coefficients(t, exp, N)
    y_arr = np.asarray(y, dtype=float)
    value = (hamiltonian_H(y, z, p) + B0 * np.abs(y_arr) ** (p + 1.0) / (p + 1.0)
             + exp.m ** 2 * B1 * y_arr * y_arr / 2.0)
    return float(value) if np.ndim(value) == 0 else value


def _start_time(exp: Exponents, amplitude: float, magnitude: float) -> float:
    # y(t) ≈ amplitude e^{mμt} on the unstable manifold of the origin
    return math.log(magnitude / amplitude) / (exp.m * exp.mu)


def flat_orbit(params: Params, gamma_bar: float, t_span: Optional[Tuple[float, float]] = None,
               cfg: Optional[IntegratorConfig] = None, start_magnitude: float = 1e-6,
               t_length: float = 80.0) -> PhaseOrbit:
    """Integrate y' = z, z' = -αz + y - |y|^{p-1}y from the asymptote of the origin

    The start sits on y' = mμ y with y = (γ̄/a) e^{mμ t_start}.
    """
    cfg = cfg or IntegratorConfig()
    exp = compute_exponents(params)
    exp.require_emden("flat_orbit")
    if not gamma_bar > 0.0:
        raise InvalidParamsError("gamma_bar must be > 0")
    amplitude = gamma_bar / exp.a
    if t_span is None:
        t_start = _start_time(exp, amplitude, start_magnitude)
        t_span = (t_start, t_start + t_length)
    growth = exp.m * exp.mu
    y0 = amplitude * math.exp(growth * t_span[0])
    if y0 > start_magnitude * (1.0 + 1e-9):
        raise InvalidParamsError(f"orbit start y0={y0:.3e} is not on the linear asymptote; "
                                 "move t_span[0] further back")
    alpha, p = exp.alpha, params.p

    def rhs(t, state):
        y, z = state[0], state[1]
        return [z, -alpha * z + y - signed_power(y, p)]

    sol = solve_system(rhs, t_span[0], [y0, growth * y0], t_span[1], cfg, [],
                       f"flat_orbit(N={params.N}, p={p:g}, gamma_bar={gamma_bar:.6g})")
    y, z = sol.y[0], sol.y[1]
    return PhaseOrbit(t=sol.t, y=y, z=z, J_trace=lyapunov_J(y, z, p),
                      meta={"system": "flat", "N": params.N, "p": p, "gamma_bar": float(gamma_bar)})


def cap_orbit(params: Params, gamma: float, t_span: Optional[Tuple[float, float]] = None,
              cfg: Optional[IntegratorConfig] = None, start_magnitude: float = 1e-6,
              t_end: float = 0.0) -> PhaseOrbit:
    """Integrate the cap Emden system y'' + αy' - y + (1+B0)|y|^{p-1}y + m²B1 y = 0

    Starts from y = (γ / (2^{q/(p-1)} a)) e^{mμt}, z = mμ y.
    """
    cfg = cfg or IntegratorConfig()
    exp = compute_exponents(params)
    exp.require_emden("cap_orbit")
    if not gamma > 0.0:
        raise InvalidParamsError("gamma must be > 0")
    N, p = params.N, params.p
    amplitude = gamma / (2.0 ** (exp.q / (p - 1.0)) * exp.a)
    if t_span is None:
        t_span = (_start_time(exp, amplitude, start_magnitude), t_end)
    if t_span[1] <= t_span[0]:
        raise InvalidParamsError("t_span must be increasing")
    growth = exp.m * exp.mu
    y0 = amplitude * math.exp(growth * t_span[0])
    alpha, m2 = exp.alpha, exp.m ** 2

    def rhs(t, state):
        y, z = state[0], state[1]
        B0, B1 = cap_coefficients(t, exp, N)
        return [z, -alpha * z + y - (1.0 + B0) * signed_power(y, p) - m2 * B1 * y]

    sol = solve_system(rhs, t_span[0], [y0, growth * y0], t_span[1], cfg, [],
                       f"cap_orbit(N={N}, p={p:g}, gamma={gamma:.6g})")
    y, z = sol.y[0], sol.y[1]
    return PhaseOrbit(t=sol.t, y=y, z=z, J_trace=lyapunov_J(y, z, p),
                      E_trace=energy_E(y, z, sol.t, exp, N), H_trace=hamiltonian_H(y, z, p),
                      meta={"system": "cap", "N": N, "p": p, "gamma": float(gamma)})


def default_trapping_epsilon(p: float, fraction: float = 0.5) -> float:
    """ε with {H < 2ε} inside the homoclinic loop, hence inside {0 <= y <= ξ}

    H(0, 0) = H(ξ, 0) = (p-1)/(2(p+1)) is the level of that loop.
    """
    if not 0.0 < fraction < 1.0:
        raise InvalidParamsError("fraction must lie in (0, 1)")
    return fraction * (p - 1.0) / (4.0 * (p + 1.0))


def trapping_thresholds(exp: Exponents, N: int, eps: float) -> float:
    """Largest T <= 0 with B0(T) ξ^{p+1}/(p+1) and m² B1(T) ξ²/2 both below ε/8"""
    p, xi = exp.p, exp.xi

    def excess(t):
        B0, B1 = cap_coefficients(t, exp, N)
        return max(B0 * xi ** (p + 1.0) / (p + 1.0), exp.m ** 2 * B1 * xi * xi / 2.0) - eps / 8.0

    if excess(0.0) < 0.0:
        return 0.0
    low = -1.0
    while excess(low) >= 0.0:
        low *= 2.0
    root = brentq(excess, low, 0.0, xtol=1e-12)
    return root - 1e-9


@dataclass
class TrappingReport:
    eps: float
    T: float
    entered: bool
    t_enter: Optional[float]
    max_H_after: Optional[float]
    violated: bool
    energy_increase: Optional[float]
    energy_bound: float
    energy_ok: bool

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def trapping_monitor(params: Params, gamma: float, eps: Optional[float] = None,
                     cfg: Optional[IntegratorConfig] = None, fraction: float = 0.5,
                     tolerance: float = 1e-8) -> TrappingReport:
    """Watch a cap orbit after it enters {H < ε, y > 0} before the horizon T"""
    cfg = cfg or IntegratorConfig()
    exp = compute_exponents(params)
    exp.require_emden("trapping_monitor")
    eps = default_trapping_epsilon(params.p, fraction) if eps is None else eps
    N, p, xi = params.N, params.p, exp.xi
    T = trapping_thresholds(exp, N, eps)
    B0_T, B1_T = cap_coefficients(T, exp, N)
    bound = xi ** (p + 1.0) / (p + 1.0) * B0_T + xi * xi / 2.0 * exp.m ** 2 * B1_T

    orbit = cap_orbit(params, gamma, cfg=cfg, t_end=T)
    inside = np.nonzero((orbit.H_trace < eps) & (orbit.y > 0.0))[0]
    if inside.size == 0:
        logger.warning(f"Orbit for gamma={gamma:.3g} never entered H < {eps:.3g} before T={T:.4g}")
        return TrappingReport(eps=eps, T=T, entered=False, t_enter=None, max_H_after=None,
                              violated=False, energy_increase=None, energy_bound=bound, energy_ok=True)
    k = int(inside[0])
    max_H = float(np.max(orbit.H_trace[k:]))
    increase = float(orbit.E_trace[-1] - orbit.E_trace[k])
    report = TrappingReport(eps=eps, T=T, entered=True, t_enter=float(orbit.t[k]), max_H_after=max_H,
                            violated=max_H >= 2.0 * eps, energy_increase=increase, energy_bound=bound,
                            energy_ok=increase <= bound + tolerance)
    logger.info(f"Trapping: entered at t={report.t_enter:.4g}, max H {max_H:.3e} vs 2eps {2 * eps:.3e}")
    return report


@dataclass
class EquilibriumReport:
    location: Tuple[float, float]
    eigenvalues: Tuple[complex, complex]
    spiral: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "location": list(self.location),
            "eigenvalues": [[ev.real, ev.imag] for ev in self.eigenvalues],
            "spiral": self.spiral,
        }


def equilibrium_report(exp: Exponents, p: float) -> EquilibriumReport:
    """Roots of λ² + αλ + (p-1) = 0 at the equilibrium (1, 0)"""
    exp.require_emden("equilibrium_report")
    alpha = exp.alpha
    discriminant = alpha * alpha - 4.0 * (p - 1.0)
    root = cmath.sqrt(discriminant)
    eigenvalues = (0.5 * (-alpha + root), 0.5 * (-alpha - root))
    return EquilibriumReport(location=(1.0, 0.0), eigenvalues=eigenvalues, spiral=discriminant < 0.0)


def flat_singular_profile(params: Params, rho_min: float, rho_max: float, n: int = 2001) -> RadialProfile:
    """a ρ^{-mu} as a profile with closed-form dense output"""
    exp = compute_exponents(params)
    mu = exp.mu

    def dense(x):
        x = np.asarray(x, dtype=float)
        value = flat_singular(x, exp)
        return value, -mu * value / x

    grid = np.geomspace(rho_min, rho_max, n)
    value, derivative = dense(grid)
    return RadialProfile(kind=ProfileKind.RHO_FLAT, grid=grid, value=value, derivative=derivative,
                         meta={"N": params.N, "p": params.p, "singular": True}, dense=dense)


@dataclass
class IntersectionReport:
    count: int
    indeterminate: int
    crossings: List[float]
    slopes: List[float]

    def __int__(self) -> int:
        return self.count


def intersection_count(profile_a: RadialProfile, profile_b: RadialProfile, interval: Tuple[float, float],
                       n_samples: int = 20001, significance: float = 1e3, rel_noise: float = 1e-10,
                       abs_noise: float = 1e-12) -> IntersectionReport:
    """Sign changes of a - b over ``interval``, each checked for simplicity

    A crossing counts when the slope of the difference times the local
    sample spacing exceeds ``significance`` times the interpolation noise
    at the crossing; otherwise it is reported as indeterminate.
    """
    if profile_a.kind is not profile_b.kind:
        raise InvalidParamsError("profiles live in different variables")
    low, high = interval
    if not low < high:
        raise InvalidParamsError("interval must be increasing")
    domain_low = max(profile_a.start, profile_b.start)
    domain_high = min(profile_a.end, profile_b.end)
    slack = 1e-12 * max(1.0, abs(domain_high))
    if low < domain_low - slack or high > domain_high + slack:
        raise InvalidParamsError(f"interval ({low:g}, {high:g}) leaves the common domain "
                                 f"({domain_low:g}, {domain_high:g})")
    low, high = max(low, domain_low), min(high, domain_high)

    x = np.geomspace(low, high, n_samples) if low > 0.0 else np.linspace(low, high, n_samples)
    difference = profile_a.evaluate(x)[0] - profile_b.evaluate(x)[0]

    def gap(point):
        return float(profile_a.evaluate(point)[0][0] - profile_b.evaluate(point)[0][0])

    count, indeterminate = 0, 0
    crossings, slopes = [], []
    for i in np.nonzero(difference[:-1] * difference[1:] < 0.0)[0]:
        root = brentq(gap, x[i], x[i + 1], xtol=1e-14 * max(1.0, x[i]))
        value_a, slope_a = (v[0] for v in profile_a.evaluate(root))
        value_b, slope_b = (v[0] for v in profile_b.evaluate(root))
        slope = slope_a - slope_b
        noise = rel_noise * max(abs(value_a), abs(value_b)) + abs_noise
        if abs(slope) * (x[i + 1] - x[i]) > significance * noise:
            count += 1
            crossings.append(float(root))
            slopes.append(float(slope))
        else:
            indeterminate += 1
            logger.warning(f"Crossing near {root:.6g} is not certified simple (slope {slope:.3e})")
    return IntersectionReport(count=count, indeterminate=indeterminate, crossings=crossings, slopes=slopes)
