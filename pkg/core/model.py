"""
efcap Model
Problem parameters, derived exponents, regime classification and the changes
of variables between the sphere, stereographic and Emden coordinates
"""

import math
import logging
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from .errors import InvalidParamsError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# p is treated as exactly critical inside this relative window
CRITICAL_RTOL = 1e-12


@dataclass(frozen=True)
class Params:
    """Dimension N of the sphere S^N and exponent p of the nonlinearity"""
    N: int
    p: float

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise InvalidParamsError("; ".join(errors))

    def validate(self) -> list:
        errors = []
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)):
            errors.append(f"N must be an integer, got {self.N!r}")
        elif self.N < 3:
            errors.append(f"N must be >= 3, got {self.N}")
        try:
            p = float(self.p)
        except (TypeError, ValueError):
            errors.append(f"p must be a real number, got {self.p!r}")
        else:
            if not math.isfinite(p) or p <= 1.0:
                errors.append(f"p must be a finite real > 1, got {self.p}")
        return errors

    @property
    def k(self) -> float:
        """Conformal weight (N-2)/2"""
        return 0.5 * (self.N - 2)

    def to_dict(self) -> Dict[str, Any]:
        return {"N": int(self.N), "p": float(self.p)}


class Criticality(Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"


class JLPosition(Enum):
    BELOW_JL = "BelowJL"
    AT_OR_ABOVE_JL = "AtOrAboveJL"


@dataclass(frozen=True)
class Regime:
    criticality: Criticality
    jl_position: JLPosition
    spiral: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "criticality": self.criticality.value,
            "jl_position": self.jl_position.value,
            "spiral": self.spiral,
        }


@dataclass(frozen=True)
class Exponents:
    """Derived constants of the problem

    a, m and alpha exist only for p >= p_S (they need N-2-mu > 0 and the
    Emden scaling); beta only in the spiral regime on top of that.
    q is defined for every p since the stereographic equation uses A^{-q}.
    """
    N: int
    p: float
    p_S: float
    p_JL: float
    mu: float
    q: float
    a: Optional[float] = None
    m: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None

    @property
    def has_emden(self) -> bool:
        return self.a is not None

    @property
    def xi(self) -> float:
        """Positive y-intercept of {J = 0}"""
        return ((self.p + 1.0) / 2.0) ** (1.0 / (self.p - 1.0))

    def require_emden(self, what: str = "this operation") -> None:
        if not self.has_emden:
            raise InvalidParamsError(
                f"{what} needs p >= p_S = {self.p_S:.6g} (got N={self.N}, p={self.p})"
            )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, float) and math.isinf(value):
                data[key] = "inf"
        return data


def sobolev_exponent(N: int) -> float:
    return math.inf if N <= 2 else (N + 2.0) / (N - 2.0)


def joseph_lundgren_exponent(N: int) -> float:
    if N < 11:
        return math.inf
    return 1.0 + 4.0 / (N - 4.0 - 2.0 * math.sqrt(N - 1.0))


def is_critical(params: Params) -> bool:
    return math.isclose(params.p, sobolev_exponent(params.N), rel_tol=CRITICAL_RTOL, abs_tol=0.0)


def _spiral_window(N: int) -> Tuple[float, float]:
    root = 2.0 * math.sqrt(N - 1.0)
    return 0.5 * (N - 4.0 - root), 0.5 * (N - 4.0 + root)


def compute_exponents(params: Params) -> Exponents:
    N, p = params.N, float(params.p)
    p_S = sobolev_exponent(N)
    mu = 2.0 / (p - 1.0)
    critical = is_critical(params)
    q = 0.0 if critical else 0.5 * (N - 2) * (p - p_S)

    a = m = alpha = beta = None
    if critical or p > p_S:
        s = mu * (N - 2.0 - mu)
        a = s ** (0.5 * mu)
        # a^{-(p-1)/2} = s^{-1/2} because mu (p-1) = 2
        m = 1.0 / math.sqrt(s)
        alpha = 0.0 if critical else m * (N - 2.0 - 2.0 * mu)
        low, high = _spiral_window(N)
        if low < mu < high:
            beta = math.sqrt((p - 1.0) - 0.25 * alpha * alpha)

    return Exponents(N=N, p=p, p_S=p_S, p_JL=joseph_lundgren_exponent(N), mu=mu, q=q,
                     a=a, m=m, alpha=alpha, beta=beta)


def classify(params: Params) -> Regime:
    N, p = params.N, float(params.p)
    if is_critical(params):
        criticality = Criticality.CRITICAL
    elif p < sobolev_exponent(N):
        criticality = Criticality.SUBCRITICAL
    else:
        criticality = Criticality.SUPERCRITICAL

    jl_position = JLPosition.AT_OR_ABOVE_JL if p >= joseph_lundgren_exponent(N) else JLPosition.BELOW_JL

    low, high = _spiral_window(N)
    mu = 2.0 / (p - 1.0)
    return Regime(criticality=criticality, jl_position=jl_position, spiral=bool(low < mu < high))


def _as_output(value: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(value) if np.ndim(like) == 0 else value


def cap_coefficients(t: ArrayLike, exp: Exponents, N: int) -> Tuple[ArrayLike, ArrayLike]:
    """B0(t) = (1+e^{2mt})^q - 1 and B1(t) = N(N-2) e^{2mt} / (1+e^{2mt})^2

    B1 is evaluated as N(N-2) / (4 cosh^2(mt)), which decays instead of
    overflowing for large |2mt|. The cap Emden system uses m^2 B1 as the
    coefficient of its linear term.
    """
    exp.require_emden("cap_coefficients")
    x = 2.0 * exp.m * np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        B0 = np.expm1(exp.q * np.logaddexp(0.0, x))
        B1 = 0.25 * N * (N - 2) / np.cosh(0.5 * x) ** 2
    return _as_output(B0, t), _as_output(B1, t)


def cap_coefficient_derivatives(t: ArrayLike, exp: Exponents, N: int) -> Tuple[ArrayLike, ArrayLike]:
    """dB0/dt and dB1/dt, both positive for t < 0"""
    exp.require_emden("cap_coefficient_derivatives")
    m, q = exp.m, exp.q
    x = 2.0 * m * np.asarray(t, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        dB0 = 2.0 * m * q * np.exp((q - 1.0) * np.logaddexp(0.0, x) + x)
        half = 0.5 * x
        dB1 = -0.5 * m * N * (N - 2) * np.tanh(half) / np.cosh(half) ** 2
    dB1 = np.nan_to_num(dB1, nan=0.0)
    return _as_output(dB0, t), _as_output(dB1, t)


def conformal_factor(r: ArrayLike) -> ArrayLike:
    """A(r) = 2 / (1 + r^2)"""
    r = np.asarray(r, dtype=float)
    return 2.0 / (1.0 + r * r)


def stereographic_u_from_U(theta: ArrayLike, U: ArrayLike, N: int, dU: Optional[ArrayLike] = None):
    """Map U(θ) on the sphere to u(r) = A(r)^{(N-2)/2} U(θ) with r = tan(θ/2)

    Returns (r, u) or, when dU/dθ is given, (r, u, du/dr) using
    du/dr = A^{k+1} (dU/dθ - k r U).
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta >= math.pi) or np.any(theta < 0.0):
        raise InvalidParamsError("theta must lie in [0, pi)")
    k = 0.5 * (N - 2)
    r = np.tan(0.5 * theta)
    A = conformal_factor(r)
    U = np.asarray(U, dtype=float)
    u = A ** k * U
    if dU is None:
        return r, u
    du = A ** (k + 1.0) * (np.asarray(dU, dtype=float) - k * r * U)
    return r, u, du


def sphere_U_from_u(r: ArrayLike, u: ArrayLike, N: int, du: Optional[ArrayLike] = None):
    """Inverse of stereographic_u_from_U"""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or not np.all(np.isfinite(r)):
        raise InvalidParamsError("r must be finite and >= 0")
    k = 0.5 * (N - 2)
    theta = 2.0 * np.arctan(r)
    A = conformal_factor(r)
    u = np.asarray(u, dtype=float)
    U = A ** (-k) * u
    if du is None:
        return theta, U
    dU = k * r * A ** (-k) * u + A ** (-k - 1.0) * np.asarray(du, dtype=float)
    return theta, U, dU


def emden_from_u(r: ArrayLike, u: ArrayLike, exp: Exponents, du: Optional[ArrayLike] = None,
                 flat: bool = False):
    """Emden variables t = (1/m) log r, y = 2^{-q/(p-1)} u r^mu / a

    With ``flat=True`` the cap prefactor is dropped, which is the flat
    transform y = u / (a r^{-mu}). Returns (t, y) or (t, y, z) with
    z = dy/dt when du/dr is given.
    """
    exp.require_emden("emden_from_u")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise InvalidParamsError("emden_from_u needs r > 0")
    scale = (1.0 if flat else 2.0 ** (-0.5 * exp.q * exp.mu)) / exp.a
    u = np.asarray(u, dtype=float)
    r_mu = r ** exp.mu
    t = np.log(r) / exp.m
    y = scale * u * r_mu
    if du is None:
        return t, y
    z = exp.m * scale * r_mu * (exp.mu * u + r * np.asarray(du, dtype=float))
    return t, y, z


def flat_singular(rho: ArrayLike, exp: Exponents) -> ArrayLike:
    """ū*(ρ) = a ρ^{-mu}"""
    exp.require_emden("flat_singular")
    rho = np.asarray(rho, dtype=float)
    return exp.a * rho ** (-exp.mu)


def flat_singular_residual(params: Params, rho_grid: ArrayLike) -> float:
    """Max relative residual of a ρ^{-mu} in ū'' + (N-1)ū'/ρ + ū^p = 0"""
    exp = compute_exponents(params)
    exp.require_emden("flat_singular_residual")
    rho = np.asarray(rho_grid, dtype=float)
    a, mu, N = exp.a, exp.mu, params.N
    base = rho ** (-mu - 2.0)
    second = mu * (mu + 1.0) * a * base
    first = -(N - 1.0) * mu * a * base
    power = (a * rho ** (-mu)) ** params.p
    scale = np.maximum.reduce([np.abs(second), np.abs(first), np.abs(power)])
    return float(np.max(np.abs(second + first + power) / scale))
