"""Error-probability optimisation: unconstrained maximiser and the UR gate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from scipy import optimize as sopt

from .effcap import effective_capacity, psi, psi_derivative, _check_method
from .errors import DomainError

EPS_LOWER = 1e-12
EPS_UPPER = 0.5
EPS_TOL = 1e-10
FLAT_SLOPE = 1e-12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class URConstraint:
    """Reliability target eps <= target_eps; ``active`` is filled in by the solver."""

    target_eps: float
    active: Optional[bool] = None

    def __post_init__(self):
        if not (isinstance(self.target_eps, (int, float)) and 0.0 < self.target_eps < 1.0):
            raise DomainError(f"target_eps must lie in (0, 1), got {self.target_eps!r}")


@dataclass(frozen=True)
class OptResult:
    eps_star: float
    ec_value: float
    constrained: bool
    iterations: int
    psi_value: float = math.nan
    at_boundary: bool = False
    low_curvature: bool = False
    method: str = "exact"
    constraint: Optional[URConstraint] = field(default=None, compare=False)


@dataclass(frozen=True)
class GoldenResult:
    x: float
    fx: float
    lower: float
    upper: float
    iterations: int


def golden_section(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> GoldenResult:
    """Minimise a unimodal ``f`` on [lower, upper] by golden-section search.

    Stops once the bracket is narrower than ``tol``.  The returned point is
    the best interior probe; the bracket endpoints are reported so callers
    can polish or test for boundary minima.
    """
    if not lower < upper:
        raise DomainError(f"need lower < upper, got [{lower}, {upper}]")
    a, b = lower, upper
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    iterations = 0
    while b - a > tol and iterations < max_iter:
        iterations += 1
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    if f1 <= f2:
        return GoldenResult(x1, f1, a, b, iterations)
    return GoldenResult(x2, f2, a, b, iterations)


def _finish(sinr, theta, blocklength, eps, method, iterations, **flags):
    value = psi(sinr, theta, blocklength, eps, method)
    return OptResult(
        eps_star=eps,
        ec_value=effective_capacity(value, theta, blocklength),
        iterations=iterations,
        psi_value=value,
        method=method,
        **flags,
    )


@lru_cache(maxsize=65536)
def _minimise_psi(sinr, theta, blocklength, method, lower, upper):
    def slope(eps):
        return psi_derivative(sinr, theta, blocklength, eps, method)

    if slope(upper) <= 0.0:
        return _finish(sinr, theta, blocklength, upper, method, 0, constrained=False, at_boundary=True)
    if slope(lower) >= 0.0:
        return _finish(sinr, theta, blocklength, lower, method, 0, constrained=False, at_boundary=True)

    # psi is convex in eps, hence unimodal in log10(eps); eps* spans decades.
    search = golden_section(
        lambda le: psi(sinr, theta, blocklength, 10.0**le, method),
        math.log10(lower),
        math.log10(upper),
        tol=1e-6,
    )
    a, b = 10.0**search.lower, 10.0**search.upper
    while slope(a) > 0.0 and a > lower:
        a = max(lower, a / 10.0)
    while slope(b) < 0.0 and b < upper:
        b = min(upper, b * 10.0)
    if abs(slope(a)) < FLAT_SLOPE and abs(slope(b)) < FLAT_SLOPE:
        return _finish(
            sinr, theta, blocklength, 0.5 * (a + b), method, search.iterations,
            constrained=False, low_curvature=True,
        )
    eps_star, info = sopt.brentq(slope, a, b, xtol=EPS_TOL * 1e-4, rtol=1e-14, full_output=True)
    return _finish(
        sinr, theta, blocklength, eps_star, method, search.iterations + info.iterations,
        constrained=False,
    )


def optimal_eps(
    sinr: float,
    theta: float,
    blocklength: int,
    method: str = "exact",
    lower: float = EPS_LOWER,
    upper: float = EPS_UPPER,
) -> OptResult:
    """Error probability minimising psi (maximising EC) over [lower, upper].

    Golden-section search on log10(eps) brackets the minimiser; the
    derivative root inside the bracket is then polished so psi'(eps*) ~ 0.
    If psi is monotone on the range the endpoint is returned with
    ``at_boundary`` set.
    """
    _check_method(method)
    if not 0.0 < lower < upper < 1.0:
        raise DomainError(f"need 0 < lower < upper < 1, got [{lower}, {upper}]")
    return _minimise_psi(float(sinr), float(theta), int(blocklength), method, float(lower), float(upper))


def constrained_optimal_eps(
    sinr: float,
    theta: float,
    blocklength: int,
    constraint: URConstraint,
    method: str = "exact",
) -> OptResult:
    """Maximise EC subject to eps <= target_eps.

    KKT sign test: a negative slope of psi at the target means the
    multiplier is positive and the constraint binds; otherwise the
    unconstrained minimiser already satisfies it.
    """
    target = constraint.target_eps
    slope = psi_derivative(sinr, theta, blocklength, target, method)
    if slope < 0.0:
        result = _finish(sinr, theta, blocklength, target, method, 0, constrained=True)
        active = True
    else:
        # convexity puts the minimiser in (0, target] when the slope there is >= 0
        result = optimal_eps(sinr, theta, blocklength, method, upper=target)
        active = False
    return OptResult(
        eps_star=result.eps_star,
        ec_value=result.ec_value,
        constrained=active,
        iterations=result.iterations,
        psi_value=result.psi_value,
        at_boundary=result.at_boundary,
        low_curvature=result.low_curvature,
        method=method,
        constraint=URConstraint(target, active=active),
    )


def max_ec(
    sinr: float,
    theta: float,
    blocklength: int,
    constraint: Optional[URConstraint] = None,
    method: str = "exact",
) -> OptResult:
    """Unconstrained or UR-constrained optimum, whichever applies."""
    if constraint is None:
        return optimal_eps(sinr, theta, blocklength, method)
    return constrained_optimal_eps(sinr, theta, blocklength, constraint, method)


def ec_sacrifice_ratio(
    sinr: float,
    theta: float,
    blocklength: int,
    constraint: URConstraint,
    method: str = "exact",
) -> float:
    """Operational EC under the reliability target divided by EC_max."""
    free = optimal_eps(sinr, theta, blocklength, method)
    bound = constrained_optimal_eps(sinr, theta, blocklength, constraint, method)
    if not bound.constrained:
        return 1.0
    return bound.ec_value / free.ec_value
