"""Scalar special functions: Gaussian Q, its inverse, and incomplete gamma.

The upper incomplete gamma function is needed for negative, non-integer
orders (the delay exponent enters as ``d = -theta*T/ln 2``), which most
libraries do not support.  Everything here is evaluated through the scaled
quantity

    F(a, x) = e^x * x^-a * Gamma(a, x)

which stays O(1)-ish in the regimes of interest and never overflows the way
``e^(1/snr)`` does for small SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .errors import DomainError, NumericalError

_LOG_MAX = math.log(1.7e308)
_TINY = 1e-300
_CF_MAX_ITER = 10_000
_SERIES_MAX_ITER = 10_000
_EPS = 1e-16


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def _check_probability(name: str, p: float) -> float:
    p = _check_finite(name, p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {p!r}")
    return p


def gaussian_q(x: float) -> float:
    """Tail probability of the standard normal, ``Q(x) = P(X > x)``."""
    x = _check_finite("x", x)
    return float(0.5 * special.erfc(x / math.sqrt(2.0)))


def gaussian_q_inv(p: float) -> float:
    """Inverse of :func:`gaussian_q` on (0, 1)."""
    p = _check_probability("p", p)
    # Q^-1(p) = -Phi^-1(p); ndtri keeps full relative accuracy for tiny p.
    return float(-special.ndtri(p))


def q_inv_derivative(eps: float) -> float:
    """d Q^-1(eps) / d eps = -sqrt(2 pi) exp(Q^-1(eps)^2 / 2)."""
    q = gaussian_q_inv(eps)
    return -math.sqrt(2.0 * math.pi) * math.exp(0.5 * q * q)


# ---------------------------------------------------------------------------
# incomplete gamma


def _cf_scaled(a: float, x: float) -> float:
    """F(a, x) by the Legendre continued fraction (modified Lentz).

    Converges for every real ``a`` when ``x > 0``; it is fast once
    ``x >= max(1, a + 1)``.
    """
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, _CF_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise NumericalError(
        f"continued fraction for Gamma({a}, {x}) did not converge in {_CF_MAX_ITER} terms"
    )


def _series_log_scaled(a: float, x: float) -> float:
    """log F(a, x) for a > 0 via Gamma(a) - lower gamma series."""
    term = 1.0 / a
    total = term
    for n in range(1, _SERIES_MAX_ITER):
        term *= x / (a + n)
        total += term
        if abs(term) < _EPS * abs(total):
            break
    else:
        raise NumericalError(f"lower gamma series for a={a}, x={x} did not converge")
    log_full = x - a * math.log(x) + math.lgamma(a)
    ratio = total * math.exp(-log_full) if log_full > -_LOG_MAX else math.inf
    if not ratio < 1.0:
        raise NumericalError(f"cancellation in Gamma({a}, {x}) series: ratio={ratio}")
    return log_full + math.log1p(-ratio)


_EULER = 0.5772156649015329
# lgamma(1 + a) = -euler*a + sum_k (-1)^k zeta(k) a^k / k, used for |a| <= 0.5
_LGAMMA1P_COEFFS = [(-1) ** k * float(special.zeta(k)) / k for k in range(2, 64)]


def _lgamma1p(a: float) -> float:
    total = 0.0
    power = a
    for coeff in _LGAMMA1P_COEFFS:
        power *= a
        total += coeff * power
        if abs(coeff * power) < _EPS * abs(total):
            break
    return -_EULER * a + total


def _small_order_upper_gamma(a: float, x: float) -> float:
    """Gamma(a, x) for |a| <= 0.5 and 0 < x < 1.

    Written as (Gamma(1+a) - 1)/a - expm1(a ln x)/a minus an alternating
    tail, so the 1/a poles of Gamma(a) and of the lower gamma cancel
    analytically instead of in floating point.
    """
    log_x = math.log(x)
    if abs(a) < 1e-150:  # O(a) corrections are far below rounding; avoids subnormal division
        head = -_EULER - log_x
    else:
        head = math.expm1(_lgamma1p(a)) / a - math.expm1(a * log_x) / a
    tail = 0.0
    term = 1.0
    for n in range(1, _SERIES_MAX_ITER):
        term *= -x / n
        piece = term / (a + n)
        tail += piece
        if abs(piece) < _EPS * abs(tail):
            break
    value = head - math.exp(a * log_x) * tail
    if not value > 0.0:
        raise NumericalError(f"small-order series for Gamma({a}, {x}) lost positivity")
    return value


def _log_scaled_upper_gamma(a: float, x: float) -> float:
    """log of F(a, x) = e^x x^-a Gamma(a, x)."""
    if x >= 1.0 and (a <= 0.5 or x >= a + 1.0):
        return math.log(_cf_scaled(a, x))
    if a > 0.5:
        return _series_log_scaled(a, x)

    # a <= 0.5 and x < 1: start from the nearest order in [-0.5, 0.5] and
    # recur downward with F(b) = (x F(b+1) - 1) / b.  Every step has
    # |b| >= 0.5 and x < 1, and x F(b+1) stays well below 1 there.
    start = a - round(a)
    steps = int(round(start - a))
    f = math.exp(x - start * math.log(x)) * _small_order_upper_gamma(start, x)
    b = start
    for _ in range(steps):
        b -= 1.0
        f = (x * f - 1.0) / b
    if not f > 0.0:
        raise NumericalError(f"downward recurrence for Gamma({a}, {x}) lost positivity")
    return math.log(f)


def log_upper_inc_gamma(a: float, x: float) -> float:
    """Natural log of ``Gamma(a, x)``; valid for any finite real order."""
    a = _check_finite("a", a)
    x = _check_finite("x", x)
    if x <= 0.0:
        raise DomainError(f"upper incomplete gamma needs x > 0, got {x!r}")
    return _log_scaled_upper_gamma(a, x) + a * math.log(x) - x


def upper_inc_gamma(a: float, x: float) -> float:
    """Upper incomplete gamma ``int_x^inf t^(a-1) e^-t dt`` for real ``a``.

    Negative non-integer orders are supported.  Results below the smallest
    double underflow to 0; use :func:`log_upper_inc_gamma` there.
    """
    log_value = log_upper_inc_gamma(a, x)
    if log_value > _LOG_MAX:
        raise NumericalError(f"Gamma({a}, {x}) overflows: log value {log_value:.6g}")
    return math.exp(log_value)


@dataclass(frozen=True)
class ScaledMoment:
    """``int_0^inf (1 + snr z)^order e^-z dz`` together with its log."""

    order: float
    snr: float
    value: float
    log_value: float


def rayleigh_moment(a: float, snr: float) -> ScaledMoment:
    """E[(1 + snr Z)^a] for Z ~ Exp(1).

    Equals ``e^(1/snr) snr^a Gamma(a+1, 1/snr)``; with ``x = 1/snr`` this is
    ``x * F(a+1, x)`` so no exponential prefactor is ever formed.
    """
    a = _check_finite("a", a)
    snr = _check_finite("snr", snr)
    if snr <= 0.0:
        raise DomainError(f"snr must be positive, got {snr!r}")
    if a == 0.0:
        return ScaledMoment(a, snr, 1.0, 0.0)
    if a == 1.0:
        return ScaledMoment(a, snr, 1.0 + snr, math.log1p(snr))
    x = 1.0 / snr
    log_value = _log_scaled_upper_gamma(a + 1.0, x) - math.log(snr)
    if log_value > _LOG_MAX:
        raise NumericalError(
            f"Rayleigh moment of order {a} at snr={snr} overflows (log value {log_value:.6g})"
        )
    return ScaledMoment(a, snr, math.exp(log_value), log_value)
