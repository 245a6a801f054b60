"""
efcap Spectral
First Dirichlet eigenvalue of the cap by shooting, Bessel and Rayleigh checks,
Pohozaev traces with nonexistence certificates, and the p -> 1 limit objects
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import quad, simpson
from scipy.optimize import brentq, minimize_scalar
from scipy.special import jn_zeros, jv

from .branch import gamma_of_theta
from .errors import ConvergenceError, InvalidParamsError
from .integrate import IntegratorConfig, ProfileKind, RadialProfile, integrate_sphere_linear
from .model import Params, compute_exponents, conformal_factor

logger = logging.getLogger(__name__)

# λ1 never exceeds this in the bracket search
LAMBDA_CEILING = 1e12

# eigen solves run at the shooting tolerances times this factor
EIGEN_TOL_FACTOR = 1e-2


def eigen_config(cfg: Optional[IntegratorConfig] = None) -> IntegratorConfig:
    """Eigen solves default to tighter tolerances than the nonlinear shooting"""
    return cfg or IntegratorConfig().scaled(EIGEN_TOL_FACTOR)


@dataclass
class EigenResult:
    N: int
    Theta: float
    lambda1: float
    phi_profile: RadialProfile
    bracket: Tuple[float, float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "Theta": self.Theta,
            "lambda1": self.lambda1,
            "bracket": list(self.bracket),
            "first_zero": self.phi_profile.first_zero,
        }


def lambda1_closed_form_n3(Theta: float) -> float:
    """(π/Θ)² - 1, the N=3 eigenvalue"""
    return (math.pi / Theta) ** 2 - 1.0


def lambda1(N: int, Theta: float, cfg: Optional[IntegratorConfig] = None) -> EigenResult:
    """Bisection (Brent) in λ on the first zero of φ(·; λ)

    The first zero moves left as λ grows (Sturm comparison); a φ without
    zero before π counts as zero at π.
    """
    cfg = eigen_config(cfg)
    if isinstance(N, bool) or int(N) != N or N < 3:
        raise InvalidParamsError(f"N must be an integer >= 3, got {N!r}")
    if not (0.0 < Theta < math.pi):
        raise InvalidParamsError(f"Theta must lie in (0, pi), got {Theta}")

    def offset(lam: float) -> float:
        zero = integrate_sphere_linear(N, lam, cfg).first_zero
        return (math.pi if zero is None else zero) - Theta

    low, high = 1e-6, 4.0 * N
    if offset(low) <= 0.0:
        raise ConvergenceError(f"Theta={Theta} too close to pi: first zero at lambda={low} already inside")
    while offset(high) >= 0.0:
        if high >= LAMBDA_CEILING:
            raise ConvergenceError(f"Theta={Theta} too close to 0: no bracket below lambda={LAMBDA_CEILING:g}")
        low, high = high, 2.0 * high

    lam = brentq(offset, low, high, xtol=1e-14, rtol=1e-14, maxiter=300)
    phi = integrate_sphere_linear(N, lam, cfg)
    logger.debug(f"lambda1(N={N}, Theta={Theta:.12g}) = {lam:.15g}")
    return EigenResult(N=N, Theta=Theta, lambda1=lam, phi_profile=phi, bracket=(low, high))


def bessel_first_zero(nu: float) -> float:
    """First positive zero of J_nu"""
    if nu < 0.0:
        raise InvalidParamsError("nu must be >= 0")
    if float(nu).is_integer():
        return float(jn_zeros(int(nu), 1)[0])
    x = np.arange(0.05, nu + 10.0, 0.05)
    values = jv(nu, x)
    i = int(np.nonzero(values[:-1] * values[1:] < 0.0)[0][0])
    return float(brentq(lambda s: jv(nu, s), x[i], x[i + 1], xtol=1e-15))


def bessel_limit_check(N: int, lambda_list: Sequence[float],
                       cfg: Optional[IntegratorConfig] = None) -> List[Tuple[float, float]]:
    """(λ, 2√λ r1(λ)) with r1 = tan(Θ1/2) the stereographic first zero

    The products approach j_{N/2-1} as λ grows.
    """
    cfg = eigen_config(cfg)
    lambdas = list(lambda_list)
    if lambdas != sorted(lambdas):
        raise InvalidParamsError("lambda_list must be increasing")
    rows = []
    for lam in lambdas:
        zero = integrate_sphere_linear(N, lam, cfg).first_zero
        if zero is None:
            raise InvalidParamsError(f"lambda={lam} too small: eigenfunction has no zero before pi")
        rows.append((float(lam), 2.0 * math.sqrt(lam) * math.tan(0.5 * zero)))
    return rows


def bessel_frame(N: int, rows: Sequence[Tuple[float, float]]) -> pd.DataFrame:
    target = bessel_first_zero(0.5 * N - 1.0)
    frame = pd.DataFrame(rows, columns=["lambda", "product"])
    frame["error"] = (frame["product"] - target).abs()
    return frame


def rayleigh_check(params: Params, profile: RadialProfile, n: int = 8001) -> Tuple[float, float]:
    """ℋ[u] from its quadratic form and from -(p-1)∫A^{-q}|u|^{p+1} r^{N-1}

    Both integrals use Simpson's rule on a uniform grid in log r from the
    profile start to the first zero R.
    """
    if profile.kind is not ProfileKind.R_STEREOGRAPHIC:
        raise InvalidParamsError("rayleigh_check expects an r_stereographic profile")
    if profile.first_zero is None:
        raise InvalidParamsError("rayleigh_check needs a profile with a first zero")
    N, p = params.N, params.p
    q = compute_exponents(params).q
    s = np.linspace(math.log(profile.start), math.log(profile.first_zero), n)
    r = np.exp(s)
    u, du = profile.evaluate(r)
    A = conformal_factor(r)
    weight = A ** -q
    measure = r ** N  # r^{N-1} dr = r^N ds
    power = np.abs(u) ** (p - 1.0)
    quadratic = (du * du - 0.25 * N * (N - 2) * A * A * u * u - p * weight * power * u * u) * measure
    potential = weight * power * u * u * measure
    H_of_u = float(simpson(quadratic, x=s))
    integral_form = float(-(p - 1.0) * simpson(potential, x=s))
    logger.debug(f"Rayleigh: quadratic form {H_of_u:.12g}, integral form {integral_form:.12g}")
    return H_of_u, integral_form


def psi0(r, N: int):
    """ψ0 = A^{(N-2)/2}(A - 1)"""
    A = conformal_factor(r)
    k = 0.5 * (N - 2)
    return A ** (k + 1.0) - A ** k


def psi0_residual(N: int, r_grid) -> float:
    """max |(L + N A²) ψ0| with derivatives of A^j = -j r A^{j+1} in closed form"""
    r = np.asarray(r_grid, dtype=float)
    if np.any(r <= 0.0):
        raise InvalidParamsError("r_grid must lie in (0, inf)")
    A = conformal_factor(r)
    k = 0.5 * (N - 2)

    def first(j):
        return -j * r * A ** (j + 1.0)

    def second(j):
        return -j * A ** (j + 1.0) + j * (j + 1.0) * r * r * A ** (j + 2.0)

    value = A ** (k + 1.0) - A ** k
    d1 = first(k + 1.0) - first(k)
    d2 = second(k + 1.0) - second(k)
    residual = d2 + (N - 1) / r * d1 + (0.25 * N * (N - 2) + N) * A * A * value
    return float(np.max(np.abs(residual)))


def _csc_power_antiderivative(x: np.ndarray, n: int) -> np.ndarray:
    """G_n with G_n' = csc^n, from G_n = -csc^{n-2} cot/(n-1) + (n-2)/(n-1) G_{n-2}"""
    if n == 0:
        return x.copy()
    if n == 1:
        return np.log(np.tan(0.5 * x))
    csc = 1.0 / np.sin(x)
    cot = np.cos(x) / np.sin(x)
    return -csc ** (n - 2) * cot / (n - 1) + (n - 2) / (n - 1) * _csc_power_antiderivative(x, n - 2)


def cap_integral(theta, Theta: float, N: int):
    """∫_θ^Θ sin^{1-N}φ dφ in closed form"""
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr <= 0.0) or np.any(theta_arr > Theta) or not Theta < math.pi:
        raise InvalidParamsError("need 0 < theta <= Theta < pi")
    n = N - 1
    value = _csc_power_antiderivative(np.asarray(Theta, dtype=float), n) - _csc_power_antiderivative(theta_arr, n)
    return float(value) if value.ndim == 0 else value


def F_function(theta, Theta: float, N: int):
    """F(θ) = cos θ sin^{N-2}θ ∫_θ^Θ sin^{1-N}, with F(0+) = 1/(N-2)"""
    theta_arr = np.asarray(theta, dtype=float)
    value = np.cos(theta_arr) * np.sin(theta_arr) ** (N - 2) * cap_integral(theta_arr, Theta, N)
    return float(value) if np.ndim(value) == 0 else value


def F_closed_form_n3(theta, Theta: float):
    return 0.5 - np.sin(2.0 * np.asarray(theta) - Theta) / (2.0 * math.sin(Theta))


def pohozaev_derivative(theta, U, Theta: float, N: int, p: float):
    """H'(θ) = (4N-4)/(p+1) |U|^{p+1} sin^{N-1}θ ((p+3)/(4N-4) - F(θ))"""
    theta_arr = np.asarray(theta, dtype=float)
    factor = (4.0 * N - 4.0) / (p + 1.0)
    return (factor * np.abs(U) ** (p + 1.0) * np.sin(theta_arr) ** (N - 1)
            * ((p + 3.0) / (4.0 * N - 4.0) - F_function(theta_arr, Theta, N)))


def _pohozaev_terms(theta, U, dU, Theta: float, N: int, p: float):
    S = np.sin(theta) ** (N - 1)
    inner = cap_integral(theta, Theta, N)
    return (-dU * dU * S * S * inner,
            -U * dU * S,
            -2.0 / (p + 1.0) * np.abs(U) ** (p + 1.0) * S * S * inner)


@dataclass
class PohozaevTrace:
    theta_grid: np.ndarray
    H_values: np.ndarray
    F_sup: float
    scale: float
    identity_residual: float
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def start_value(self) -> float:
        return float(self.H_values[0])

    @property
    def end_value(self) -> float:
        return float(self.H_values[-1])

    def endpoints_ok(self, tol: float = 1e-8, include_start: bool = True) -> bool:
        bound = tol * self.scale
        ok = abs(self.end_value) <= bound
        if include_start:
            ok = ok and abs(self.start_value) <= bound
        return ok

    def summary(self) -> Dict[str, Any]:
        return {
            "H_start": self.start_value,
            "H_end": self.end_value,
            "F_sup": self.F_sup,
            "scale": self.scale,
            "identity_residual": self.identity_residual,
        }


def pohozaev_trace(params: Params, profile: RadialProfile, n: int = 2001,
                   identity_points: int = 8) -> PohozaevTrace:
    """H(θ) on a log grid from the profile start to its first zero Θ

    ``identity_residual`` compares H(θ_j) with -∫_{θ_j}^Θ H' at a few
    points, relative to ``scale`` (largest summand magnitude on the grid).
    """
    if profile.kind is not ProfileKind.THETA_ON_SPHERE:
        raise InvalidParamsError("pohozaev_trace expects a theta_on_sphere profile")
    if profile.first_zero is None:
        raise InvalidParamsError("pohozaev_trace needs a profile with a first zero")
    N, p = params.N, params.p
    Theta = profile.first_zero
    theta = np.geomspace(profile.start, Theta, n)
    theta[-1] = Theta
    U, dU = profile.evaluate(theta)
    terms = _pohozaev_terms(theta, U, dU, Theta, N, p)
    H = terms[0] + terms[1] + terms[2]
    scale = float(max(np.max(np.abs(term)) for term in terms))

    def H_prime(x):
        return float(pohozaev_derivative(x, profile.evaluate(x)[0][0], Theta, N, p))

    residual = 0.0
    for x in np.geomspace(10.0 * profile.start, 0.9 * Theta, identity_points):
        U_x, dU_x = (v[0] for v in profile.evaluate(x))
        H_x = sum(float(term) for term in _pohozaev_terms(x, U_x, dU_x, Theta, N, p))
        integral, _ = quad(H_prime, x, Theta, limit=200, epsabs=1e-13 * scale, epsrel=1e-11)
        residual = max(residual, abs(H_x + integral) / scale)

    trace = PohozaevTrace(theta_grid=theta, H_values=H, F_sup=sup_F(N, Theta), scale=scale,
                          identity_residual=residual, meta={"N": N, "p": p, "Theta": Theta})
    logger.info(f"Pohozaev: H(start)={trace.start_value:.3e}, H(Theta)={trace.end_value:.3e}, "
                f"scale {scale:.3e}")
    return trace


@dataclass
class PohozaevRate:
    slope: float
    exponent: float
    prefactor_ratio: float

    def ok(self, tol: float = 1e-2) -> bool:
        return abs(self.slope - self.exponent) <= tol and abs(self.prefactor_ratio - 1.0) <= tol


def pohozaev_rate_check(params: Params, profile: RadialProfile, upper: float = 1e-2,
                        n: int = 200) -> PohozaevRate:
    """Fit H(θ) ≈ C θ^{N-2-2μ} near the pole of a singular profile

    The expected prefactor is C = a²μ(N-2-μ)/((N-2)(1+μ)).
    """
    exp = compute_exponents(params)
    exp.require_emden("pohozaev_rate_check")
    N, p, mu, a = params.N, params.p, exp.mu, exp.a
    Theta = profile.first_zero
    theta = np.geomspace(10.0 * profile.start, upper, n)
    U, dU = profile.evaluate(theta)
    H = sum(_pohozaev_terms(theta, U, dU, Theta, N, p))
    exponent = N - 2.0 - 2.0 * mu
    slope, intercept = np.polyfit(np.log(theta), np.log(np.abs(H)), 1)
    expected = a * a * mu * (N - 2.0 - mu) / ((N - 2.0) * (1.0 + mu))
    ratio = float(np.median(H / (expected * theta ** exponent)))
    return PohozaevRate(slope=float(slope), exponent=exponent, prefactor_ratio=ratio)


def sup_F(N: int, Theta: float, samples: int = 10_000) -> float:
    """sup of F on (0, Θ]: dense sampling, bounded refinement around the top 3
    samples, and the limit F(0+) = 1/(N-2)"""
    grid = np.linspace(0.0, Theta, samples + 1)[1:]
    values = F_function(grid, Theta, N)
    best = max(float(np.max(values)), 1.0 / (N - 2))
    for i in np.argsort(values)[-3:]:
        low = grid[max(i - 1, 0)]
        high = grid[min(i + 1, samples - 1)]
        if high <= low:
            continue
        result = minimize_scalar(lambda x: -F_function(x, Theta, N), bounds=(low, high),
                                 method="bounded", options={"xatol": 1e-12})
        best = max(best, -float(result.fun))
    return best


def nonexistence_certificate(N: int, p: float, Theta: float, samples: int = 10_000,
                             margin: float = 1e-9) -> bool:
    """True when (p+3)/(4N-4) > sup F + margin, so H is increasing and no solution exists"""
    if not (0.0 < Theta < math.pi):
        raise InvalidParamsError("Theta must lie in (0, pi)")
    if not p > 1.0:
        raise InvalidParamsError("p must be > 1")
    return (p + 3.0) / (4.0 * N - 4.0) > sup_F(N, Theta, samples) + margin


def nonexistence_bound_n3(p: float) -> float:
    """π - arcsin(4/(p-1)): for N=3 no solution on caps with Θ at or below it"""
    if p < 5.0:
        raise InvalidParamsError("the N=3 bound needs p >= 5")
    return math.pi - math.asin(4.0 / (p - 1.0))


def nonexistence_scan(N: int, p_list: Sequence[float], Theta_list: Sequence[float],
                      samples: int = 10_000, margin: float = 1e-9) -> pd.DataFrame:
    rows = []
    for Theta in Theta_list:
        sup = sup_F(N, Theta, samples)
        for p in p_list:
            certified = (p + 3.0) / (4.0 * N - 4.0) > sup + margin
            rows.append({"N": N, "p": float(p), "Theta": float(Theta), "certified": bool(certified)})
    return pd.DataFrame(rows, columns=["N", "p", "Theta", "certified"])


def theta_dagger(N: int, cfg: Optional[IntegratorConfig] = None, method: str = "shoot") -> float:
    """Θ† with λ1(Θ†) = 1

    "shoot" reads the first zero of φ at λ = 1; "bisect" solves λ1(Θ) = 1.
    """
    cfg = eigen_config(cfg)
    if method == "shoot":
        zero = integrate_sphere_linear(N, 1.0, cfg).first_zero
        if zero is None:
            raise ConvergenceError(f"phi at lambda=1 has no zero before pi for N={N}")
        return zero
    if method == "bisect":
        return brentq(lambda Theta: lambda1(N, Theta, cfg).lambda1 - 1.0, 0.5, math.pi - 1e-3,
                      xtol=1e-13, rtol=1e-14)
    raise InvalidParamsError(f"unknown method {method!r}")


def closed_form_phi_n3(Theta: float) -> Callable[[float], float]:
    """φ(θ) = Θ sin(πθ/Θ) / (π sin θ) for N=3"""
    def phi(theta: float) -> float:
        return Theta * math.sin(math.pi * theta / Theta) / (math.pi * math.sin(theta))
    return phi


def gamma_dagger(N: int, cfg: Optional[IntegratorConfig] = None,
                 phi: Optional[Callable[[float], float]] = None, cutoff: float = 1e-8) -> float:
    """Γ† = exp(-∫φ² log φ sin^{N-1} / ∫φ² sin^{N-1}) over (0, Θ†)

    φ²log φ vanishes at Θ†, so the last cell of width ``cutoff`` is dropped.
    """
    cfg = eigen_config(cfg)
    Theta = theta_dagger(N, cfg)
    low = cfg.theta_start
    if phi is None:
        profile = integrate_sphere_linear(N, 1.0, cfg)

        def phi(theta: float) -> float:
            return float(profile.evaluate(theta)[0][0])

    def weighted(theta):
        return phi(theta) ** 2 * math.sin(theta) ** (N - 1)

    def weighted_log(theta):
        value = phi(theta)
        return value * value * math.log(abs(value)) * math.sin(theta) ** (N - 1)

    top = Theta - cutoff
    numerator, num_err = quad(weighted_log, low, top, limit=400, epsabs=1e-13, epsrel=1e-11)
    denominator, den_err = quad(weighted, low, top, limit=400, epsabs=1e-13, epsrel=1e-11)
    if not denominator > 0.0 or num_err > 1e-8 or den_err > 1e-8:
        raise ConvergenceError(f"Gamma-dagger quadrature failed (errors {num_err:.2e}, {den_err:.2e})")
    value = math.exp(-numerator / denominator)
    logger.info(f"Gamma-dagger(N={N}) = {value:.10g} at Theta-dagger = {Theta:.10g}")
    return value


def gamma_p_trend(N: int, Theta: float, p_list: Sequence[float],
                  cfg: Optional[IntegratorConfig] = None) -> List[Tuple[float, float]]:
    """(p, Γ(p)) along p_list via gamma_of_theta"""
    return [(float(p), gamma_of_theta(Params(N, p), Theta, cfg)) for p in p_list]
