"""
efcap Integrate
Adaptive integration of the radial equations with series starts at the
coordinate singularities and dense-output first-zero detection
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from .errors import IntegrationError, InvalidParamsError
from .model import Params, conformal_factor

logger = logging.getLogger(__name__)

# right-hand-side evaluations per accepted step, dense output included
_STAGES = {"RK45": 7, "DOP853": 16}

# distance to the antipode at which sphere shooting leaves θ for τ = -log(π - θ)
HANDOVER_GAP = 0.5 * math.pi
# closest approach to the antipode in τ
GAP_FLOOR = 1e-300


@dataclass
class IntegratorConfig:
    """Tolerances and work limits shared by every integration"""
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    theta_start: float = 1e-6
    max_step: float = math.inf
    max_steps: int = 200_000
    method: str = "DOP853"

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise InvalidParamsError("; ".join(errors))

    def validate(self) -> List[str]:
        errors = []
        if not (0.0 < self.rel_tol <= 1e-3):
            errors.append("rel_tol must be in (0, 1e-3]")
        if not self.abs_tol > 0.0:
            errors.append("abs_tol must be > 0")
        if not (0.0 < self.theta_start < 1e-2):
            errors.append("theta_start must be in (0, 1e-2)")
        if not self.max_step > 0.0:
            errors.append("max_step must be > 0")
        if int(self.max_steps) < 1:
            errors.append("max_steps must be >= 1")
        if self.method not in _STAGES:
            errors.append(f"method must be one of {sorted(_STAGES)}")
        return errors

    def scaled(self, factor: float) -> "IntegratorConfig":
        """Same config with both tolerances multiplied by ``factor``"""
        data = asdict(self)
        data["rel_tol"] = min(self.rel_tol * factor, 1e-3)
        data["abs_tol"] = self.abs_tol * factor
        return IntegratorConfig(**data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if math.isinf(data["max_step"]):
            data["max_step"] = "inf"
        return data


class ProfileKind(Enum):
    THETA_ON_SPHERE = "theta_on_sphere"
    R_STEREOGRAPHIC = "r_stereographic"
    RHO_FLAT = "rho_flat"


DenseFn = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


@dataclass
class RadialProfile:
    """Solution samples on the accepted steps plus a dense interpolant

    Sphere profiles that went past the equator also carry their distance to
    the antipode, ``gap = π - θ``, at full precision: ``zero_gap`` for the
    first zero, ``gap`` per grid point and ``dense_gap`` for evaluation.
    """
    kind: ProfileKind
    grid: np.ndarray
    value: np.ndarray
    derivative: np.ndarray
    first_zero: Optional[float] = None
    end_derivative: Optional[float] = None
    zero_error: float = 0.0
    meta: Dict[str, Any] = field(default_factory=dict)
    dense: Optional[DenseFn] = field(default=None, repr=False, compare=False)
    zero_gap: Optional[float] = None
    gap: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    dense_gap: Optional[DenseFn] = field(default=None, repr=False, compare=False)

    @property
    def start(self) -> float:
        return float(self.grid[0])

    @property
    def end(self) -> float:
        return float(self.grid[-1])

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """Value and derivative at ``x`` from the dense output"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.dense is not None:
            return self.dense(x)
        return (np.interp(x, self.grid, self.value), np.interp(x, self.grid, self.derivative))

    def evaluate_gap(self, gap) -> Tuple[np.ndarray, np.ndarray]:
        """Value and θ-derivative at θ = π - gap"""
        gap = np.atleast_1d(np.asarray(gap, dtype=float))
        if self.dense_gap is not None:
            return self.dense_gap(gap)
        return self.evaluate(math.pi - gap)

    def sign_changes(self) -> int:
        signs = np.sign(self.value[self.value != 0.0])
        return int(np.count_nonzero(signs[1:] != signs[:-1]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.grid, "value": self.value, "derivative": self.derivative})


class _BudgetExceeded(Exception):
    pass


def _core_scale(value: float, p: float, coefficient: float) -> float:
    """Width of the region where the nonlinearity dominates the start"""
    strength = coefficient * abs(value) ** (p - 1.0)
    return 1.0 if strength <= 1.0 else strength ** -0.5


def zero_event(component: int, terminal: bool, direction: float = -1.0):
    def event(x, y):
        return y[component]
    event.terminal = terminal
    event.direction = direction
    return event


def solve_system(rhs, x0: float, y0: Sequence[float], x_end: float, cfg: IntegratorConfig,
                 events: Sequence[Callable], label: str, atol=None):
    budget = int(cfg.max_steps) * _STAGES[cfg.method]
    calls = [0]

    def counted(x, y):
        calls[0] += 1
        if calls[0] > budget:
            raise _BudgetExceeded()
        return rhs(x, y)

    try:
        sol = solve_ivp(counted, (x0, x_end), np.asarray(y0, dtype=float), method=cfg.method,
                        rtol=cfg.rel_tol, atol=cfg.abs_tol if atol is None else atol,
                        max_step=cfg.max_step, dense_output=True, events=list(events))
    except _BudgetExceeded:
        logger.warning(f"{label}: step budget of {cfg.max_steps} exhausted")
        raise IntegrationError(f"{label}: step budget exhausted (max_steps={cfg.max_steps}); "
                               "tolerance too tight for the budget")
    if sol.status == -1:
        logger.warning(f"{label}: solver failed: {sol.message}")
        raise IntegrationError(f"{label}: {sol.message}")
    logger.debug(f"{label}: {sol.t.size} steps, {sol.nfev} evaluations")
    return sol


def _first_event(sol, index: int = 0) -> Tuple[Optional[float], Optional[np.ndarray]]:
    if sol.t_events is None or len(sol.t_events[index]) == 0:
        return None, None
    return float(sol.t_events[index][0]), sol.y_events[index][0]


def _zero_error(grid, value, zero: Optional[float], slope: Optional[float], cfg: IntegratorConfig) -> float:
    if zero is None or not slope:
        return 0.0
    tail = np.abs(value[grid >= 0.5 * zero])
    scale = 1.0 + (float(tail.max()) if tail.size else 0.0)
    return (cfg.rel_tol * scale + cfg.abs_tol) / abs(slope)


def _make_profile(kind: ProfileKind, sol, zero: Optional[float], state: Optional[np.ndarray],
                  cfg: IntegratorConfig, meta: Dict[str, Any], components=(0, 1)) -> RadialProfile:
    i, j = components
    grid, value, derivative = sol.t, sol.y[i], sol.y[j]
    slope = float(state[j]) if state is not None else None
    interpolant = sol.sol

    def dense(x):
        states = interpolant(x)
        return states[i], states[j]

    return RadialProfile(kind=kind, grid=grid, value=value, derivative=derivative,
                         first_zero=zero, end_derivative=slope,
                         zero_error=_zero_error(grid, value, zero, slope, cfg),
                         meta=meta, dense=dense)


def signed_power(value: float, p: float) -> float:
    return math.copysign(abs(value) ** p, value)


Forcing = Callable[[np.ndarray], Sequence[float]]


def _sphere_rhs(N: int, forcing: Forcing):
    """Pairs (U, U') with U'' + (N-1) cot(θ) U' + f = 0"""
    def rhs(theta, y):
        cot = math.cos(theta) / math.sin(theta)
        out = []
        for i, term in enumerate(forcing(y[0::2])):
            slope = y[2 * i + 1]
            out.extend((slope, -(N - 1) * cot * slope - term))
        return out
    return rhs


def _reflected_rhs(N: int, forcing: Forcing):
    """Pairs (V, σV') in τ = -log σ, where V(σ) = U(π - σ) solves the same equation"""
    def rhs(tau, y):
        sigma = math.exp(-tau)
        weight = (N - 1) * sigma * math.cos(sigma) / math.sin(sigma) - 1.0
        out = []
        for i, term in enumerate(forcing(y[0::2])):
            flux = y[2 * i + 1]
            out.extend((-flux, weight * flux + sigma * sigma * term))
        return out
    return rhs


@dataclass
class _Crossing:
    theta: float
    gap: float
    state: np.ndarray


@dataclass
class _SphereShot:
    head: Any
    tail: Any
    crossings: List[Optional[_Crossing]]


def _shoot_sphere(N: int, forcing: Forcing, y0: Sequence[float], theta0: float, cfg: IntegratorConfig,
                  scales: Sequence[float], label: str, events: Sequence[Tuple[int, bool, float]],
                  theta_end: Optional[float] = None, end_gap: float = GAP_FLOOR) -> _SphereShot:
    """March in θ up to the equator, then in τ = -log(π - θ) towards the antipode

    ``events`` are (component, terminal, direction) value crossings; the
    first crossing of each is returned in θ-frame state with its exact gap.
    ``scales`` sets the absolute tolerance per component.
    """
    atol = cfg.abs_tol * np.asarray(scales, dtype=float)
    handover = math.pi - HANDOVER_GAP
    reflect = theta_end is None or theta_end > handover
    head = solve_system(_sphere_rhs(N, forcing), theta0, y0, handover if reflect else theta_end, cfg,
                        [zero_event(*spec) for spec in events], label, atol=atol)
    crossings: List[Optional[_Crossing]] = []
    for index in range(len(events)):
        theta, state = _first_event(head, index)
        crossings.append(None if theta is None else _Crossing(theta, math.pi - theta, state))
    if not reflect or head.status == 1:
        return _SphereShot(head, None, crossings)

    if theta_end is not None:
        end_gap = math.pi - theta_end
    start = np.array(head.y[:, -1], dtype=float)
    start[1::2] *= -HANDOVER_GAP
    tail = solve_system(_reflected_rhs(N, forcing), -math.log(HANDOVER_GAP), start, -math.log(end_gap), cfg,
                        [zero_event(c, terminal and crossings[n] is None, direction)
                         for n, (c, terminal, direction) in enumerate(events)],
                        f"{label} near antipode", atol=atol)
    for index in range(len(events)):
        tau, state = _first_event(tail, index)
        if crossings[index] is None and tau is not None:
            gap = math.exp(-tau)
            theta_state = np.array(state, dtype=float)
            theta_state[1::2] = -theta_state[1::2] / gap
            crossings[index] = _Crossing(math.pi - gap, gap, theta_state)
    return _SphereShot(head, tail, crossings)


def _sphere_profile(shot: _SphereShot, pair: int, crossing: Optional[_Crossing], cfg: IntegratorConfig,
                    meta: Dict[str, Any]) -> RadialProfile:
    i, j = 2 * pair, 2 * pair + 1
    head, tail = shot.head, shot.tail
    grid, gap = head.t, math.pi - head.t
    value, derivative = head.y[i], head.y[j]
    if tail is not None:
        sigma = np.exp(-tail.t[1:])
        grid = np.concatenate([grid, math.pi - sigma])
        gap = np.concatenate([gap, sigma])
        value = np.concatenate([value, tail.y[i, 1:]])
        derivative = np.concatenate([derivative, -tail.y[j, 1:] / sigma])

    def from_head(theta):
        states = head.sol(theta)
        return states[i], states[j]

    def from_tail(s):
        states = tail.sol(-np.log(np.maximum(s, GAP_FLOOR)))
        return states[i], -states[j] / s

    def split(x, near, far_fn, near_fn, near_arg):
        values, slopes = np.empty_like(x), np.empty_like(x)
        if np.any(~near):
            values[~near], slopes[~near] = far_fn(x[~near])
        if np.any(near):
            values[near], slopes[near] = near_fn(near_arg(x[near]))
        return values, slopes

    def dense(x):
        if tail is None:
            return from_head(x)
        return split(x, x > math.pi - HANDOVER_GAP, from_head, from_tail, lambda t: math.pi - t)

    def dense_gap(s):
        if tail is None:
            return from_head(math.pi - s)
        return split(s, s < HANDOVER_GAP, lambda t: from_head(math.pi - t), from_tail, lambda t: t)

    zero = zero_gap = slope = None
    if crossing is not None:
        zero, zero_gap, slope = crossing.theta, crossing.gap, float(crossing.state[j])
    return RadialProfile(kind=ProfileKind.THETA_ON_SPHERE, grid=grid, value=value, derivative=derivative,
                         first_zero=zero, end_derivative=slope,
                         zero_error=_zero_error(grid, value, zero, slope, cfg), meta=meta, dense=dense,
                         zero_gap=zero_gap, gap=gap, dense_gap=dense_gap)


def integrate_sphere_regular(params: Params, Gamma: float, cfg: Optional[IntegratorConfig] = None,
                             stop_at_zero: bool = True, theta_end: Optional[float] = None,
                             coefficient: float = 1.0) -> RadialProfile:
    """Solve U'' + (N-1) cot(θ) U' + κ|U|^{p-1}U = 0, U(0)=Γ, U'(0)=0

    Starts from the series U = Γ - κΓ^p θ²/(2N) at θ0 = theta_start times the
    core width. Stops at the first zero Θ(Γ) unless ``stop_at_zero`` is off.
    Past the equator the solution is followed in τ = -log(π - θ), so zeros
    within 1e-300 of the antipode are still located; ``zero_gap`` is π - Θ.
    """
    cfg = cfg or IntegratorConfig()
    if not Gamma > 0.0:
        raise InvalidParamsError(f"Gamma must be > 0, got {Gamma}")
    if not coefficient > 0.0:
        raise InvalidParamsError(f"coefficient must be > 0, got {coefficient}")
    N, p = params.N, float(params.p)
    theta0 = cfg.theta_start * _core_scale(Gamma, p, coefficient)
    forcing = coefficient * Gamma ** p / N
    y0 = [Gamma - 0.5 * forcing * theta0 ** 2, -forcing * theta0]
    # small Γ: U' is of order κΓ^p, far below abs_tol
    scales = [min(1.0, Gamma), min(1.0, coefficient * Gamma ** p)]

    shot = _shoot_sphere(N, lambda values: (coefficient * signed_power(values[0], p),), y0, theta0, cfg,
                         scales, f"sphere_regular(N={N}, p={p:g}, Gamma={Gamma:.6g})",
                         [(0, stop_at_zero, -1.0)], theta_end=theta_end,
                         end_gap=GAP_FLOOR if stop_at_zero else cfg.abs_tol)
    crossing = shot.crossings[0]
    if crossing is None and stop_at_zero and theta_end is None:
        raise IntegrationError(f"no zero before pi for N={N}, p={p}, Gamma={Gamma:.6g}; "
                               "every regular solution vanishes inside (0, pi)")
    meta = {"N": N, "p": p, "Gamma": float(Gamma), "theta0": theta0, "coefficient": coefficient}
    return _sphere_profile(shot, 0, crossing, cfg, meta)


def integrate_sphere_singular(params: Params, theta0: float, U0: float, dU0: float,
                              cfg: Optional[IntegratorConfig] = None) -> RadialProfile:
    """Integrate the sphere equation forward from given data at θ0 to the first zero"""
    cfg = cfg or IntegratorConfig()
    N, p = params.N, float(params.p)
    shot = _shoot_sphere(N, lambda values: (signed_power(values[0], p),), [U0, dU0], theta0, cfg, [1.0, 1.0],
                         f"sphere_singular(N={N}, p={p:g}, theta0={theta0:.3g})", [(0, True, -1.0)])
    crossing = shot.crossings[0]
    if crossing is None:
        raise IntegrationError(f"singular solution has no zero before pi (N={N}, p={p})")
    meta = {"N": N, "p": p, "theta0": theta0}
    return _sphere_profile(shot, 0, crossing, cfg, meta)


def integrate_flat_regular(params: Params, gamma_bar: float, rho_max: float,
                           cfg: Optional[IntegratorConfig] = None) -> RadialProfile:
    """Solve ū'' + (N-1)ū'/ρ + |ū|^{p-1}ū = 0, ū(0)=γ̄ on (0, rho_max]

    Integration runs through any zero; the first one is recorded.
    """
    cfg = cfg or IntegratorConfig()
    if not gamma_bar > 0.0 or not rho_max > 0.0:
        raise InvalidParamsError("gamma_bar and rho_max must be > 0")
    N, p = params.N, float(params.p)
    rho0 = cfg.theta_start * _core_scale(gamma_bar, p, 1.0)
    if rho0 >= rho_max:
        raise InvalidParamsError(f"rho_max={rho_max} lies inside the series start")
    forcing = gamma_bar ** p / N
    y0 = [gamma_bar - 0.5 * forcing * rho0 ** 2, -forcing * rho0]

    def rhs(rho, y):
        return [y[1], -(N - 1) * y[1] / rho - signed_power(y[0], p)]

    sol = solve_system(rhs, rho0, y0, rho_max, cfg, [zero_event(0, False)],
                       f"flat_regular(N={N}, p={p:g}, gamma_bar={gamma_bar:.6g})")
    zero, state = _first_event(sol)
    meta = {"N": N, "p": p, "gamma_bar": float(gamma_bar), "rho0": rho0}
    return _make_profile(ProfileKind.RHO_FLAT, sol, zero, state, cfg, meta)


def integrate_sphere_linear(N: int, lam: float, cfg: Optional[IntegratorConfig] = None,
                            theta_end: Optional[float] = None) -> RadialProfile:
    """Solve φ'' + (N-1) cot(θ) φ' + λφ = 0, φ(0)=1, φ'(0)=0

    ``first_zero`` stays None when φ has no zero before π; that outcome is
    legitimate for small λ.
    """
    cfg = cfg or IntegratorConfig()
    if not lam > 0.0:
        raise InvalidParamsError(f"lambda must be > 0, got {lam}")
    if N < 3:
        raise InvalidParamsError(f"N must be >= 3, got {N}")
    theta0 = cfg.theta_start * min(1.0, lam ** -0.5)
    y0 = [1.0 - 0.5 * lam * theta0 ** 2 / N, -lam * theta0 / N]
    end = theta_end if theta_end is not None else math.pi - cfg.theta_start

    def rhs(theta, y):
        return [y[1], -(N - 1) * math.cos(theta) / math.sin(theta) * y[1] - lam * y[0]]

    sol = solve_system(rhs, theta0, y0, end, cfg, [zero_event(0, True)],
                       f"sphere_linear(N={N}, lambda={lam:.6g})")
    zero, state = _first_event(sol)
    if zero is None:
        logger.debug(f"sphere_linear(N={N}, lambda={lam:.6g}): no zero before pi")
    meta = {"N": N, "lambda": float(lam), "theta0": theta0}
    return _make_profile(ProfileKind.THETA_ON_SPHERE, sol, zero, state, cfg, meta)


def integrate_variational(params: Params, Gamma: float, cfg: Optional[IntegratorConfig] = None
                          ) -> Tuple[RadialProfile, RadialProfile, float]:
    """Co-integrate u(r, γ) and w = ∂u/∂γ in the stereographic frame

    u'' + (N-1)u'/r + N(N-2)/4 A² u + A^{-q}|u|^{p-1}u = 0, u(0) = γ
    w'' + (N-1)w'/r + N(N-2)/4 A² w + p A^{-q}|u|^{p-1} w = 0, w(0) = 1

    Both are shot on the sphere as U and W = ∂U/∂Γ, with the same antipodal
    handover as the regular shooter, and mapped through u = A^k U and
    w = 2^{-k} A^k W. The θ-frame values at Θ go into ``meta`` as
    ``U_theta_end`` and ``W_end``.

    Returns (u profile, w profile, w at the first zero R(γ)).
    """
    cfg = cfg or IntegratorConfig()
    if not Gamma > 0.0:
        raise InvalidParamsError(f"Gamma must be > 0, got {Gamma}")
    N, p = params.N, float(params.p)
    k = params.k
    theta0 = cfg.theta_start * _core_scale(Gamma, p, 1.0)
    u_curv = Gamma ** p / N
    w_curv = p * Gamma ** (p - 1.0) / N
    y0 = [Gamma - 0.5 * u_curv * theta0 ** 2, -u_curv * theta0, 1.0 - 0.5 * w_curv * theta0 ** 2, -w_curv * theta0]
    scales = [min(1.0, Gamma), min(1.0, Gamma ** p), 1.0, min(1.0, p * Gamma ** (p - 1.0))]

    def forcing(values):
        U, W = values[0], values[1]
        return (signed_power(U, p), p * abs(U) ** (p - 1.0) * W)

    shot = _shoot_sphere(N, forcing, y0, theta0, cfg, scales, f"variational(N={N}, p={p:g}, Gamma={Gamma:.6g})",
                         [(0, True, -1.0), (2, False, 0.0)])
    u_crossing, w_crossing = shot.crossings
    if u_crossing is None:
        raise IntegrationError(f"u(r, gamma) has no zero before the antipode (N={N}, p={p}, Gamma={Gamma:.6g})")
    meta = {"N": N, "p": p, "Gamma": float(Gamma), "gamma": 2.0 ** k * Gamma, "theta0": theta0}
    U_profile = _sphere_profile(shot, 0, u_crossing, cfg, meta)
    W_profile = _sphere_profile(shot, 1, w_crossing, cfg, dict(meta))
    u_profile = _stereographic(U_profile, N, 1.0)
    w_profile = _stereographic(W_profile, N, 2.0 ** -k)

    U_theta_end, W_end = float(u_crossing.state[1]), float(u_crossing.state[2])
    w_end = 2.0 ** -k * _antipodal_factor(u_crossing.gap) ** k * W_end
    u_profile.meta.update(Theta=u_crossing.theta, Theta_gap=u_crossing.gap, U_theta_end=U_theta_end, W_end=W_end)
    return u_profile, w_profile, w_end


def _antipodal_factor(gap):
    """A(r) at r = cot(gap/2), i.e. 2 sin²(gap/2)"""
    return 2.0 * np.sin(0.5 * np.asarray(gap, dtype=float)) ** 2


def stereographic_radius(theta: float, gap: Optional[float] = None) -> float:
    """r = tan(θ/2), taken as 1/tan(gap/2) past the equator when the gap is known"""
    if gap is not None and gap < HANDOVER_GAP:
        return 1.0 / math.tan(0.5 * gap)
    return math.tan(0.5 * theta)


def _stereographic(profile: RadialProfile, N: int, factor: float) -> RadialProfile:
    if profile.kind is not ProfileKind.THETA_ON_SPHERE:
        raise InvalidParamsError("to_stereographic expects a theta_on_sphere profile")
    k = 0.5 * (N - 2)
    r = np.tan(0.5 * profile.grid)
    A = conformal_factor(r)
    if profile.gap is not None:
        near = profile.gap < HANDOVER_GAP
        r[near] = 1.0 / np.tan(0.5 * profile.gap[near])
        A[near] = _antipodal_factor(profile.gap[near])
    value = factor * A ** k * profile.value
    derivative = factor * A ** (k + 1.0) * (profile.derivative - k * r * profile.value)
    source = profile

    def dense(x):
        x = np.asarray(x, dtype=float)
        U, dU = np.empty_like(x), np.empty_like(x)
        Ax = np.empty_like(x)
        far = x > 1.0
        if np.any(~far):
            U[~far], dU[~far] = source.evaluate(2.0 * np.arctan(x[~far]))
            Ax[~far] = conformal_factor(x[~far])
        if np.any(far):
            gap = 2.0 * np.arctan(1.0 / x[far])
            U[far], dU[far] = source.evaluate_gap(gap)
            Ax[far] = _antipodal_factor(gap)
        return factor * Ax ** k * U, factor * Ax ** (k + 1.0) * (dU - k * x * U)

    zero = end_slope = None
    error = 0.0
    if profile.first_zero is not None:
        zero = stereographic_radius(profile.first_zero, profile.zero_gap)
        if profile.zero_gap is not None and profile.zero_gap < HANDOVER_GAP:
            A_zero = float(_antipodal_factor(profile.zero_gap))
        else:
            A_zero = 2.0 / (1.0 + zero * zero)
        end_slope = factor * A_zero ** (k + 1.0) * profile.end_derivative
        error = profile.zero_error / A_zero
    meta = dict(profile.meta, frame="stereographic")
    return RadialProfile(kind=ProfileKind.R_STEREOGRAPHIC, grid=r, value=value, derivative=derivative,
                         first_zero=zero, end_derivative=end_slope, zero_error=error,
                         meta=meta, dense=dense)


def to_stereographic(profile: RadialProfile, N: int) -> RadialProfile:
    """Re-express a θ-profile in the stereographic variable r = tan(θ/2)"""
    return _stereographic(profile, N, 1.0)
