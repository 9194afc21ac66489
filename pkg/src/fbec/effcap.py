"""Effective capacity of one node over quasi-static Rayleigh fading.

psi(eps) = E[eps + (1 - eps) exp(-theta T r(Z))] with Z ~ Exp(1) and r the
normal-approximation rate.  Writing exp(-theta T r) = (1 + rho z)^d e^(c x),

    d = -theta T / ln 2,   c = theta sqrt(T) Q^-1(eps) log2 e,
    x = sqrt(1 - (1 + rho z)^-2),

several evaluations of psi are provided:

* ``psi_exact``  adaptive quadrature of the defining integral (oracle);
* ``psi_rule``   the same integral on a fixed composite Gauss-Legendre rule,
                 vectorised over eps -- the fast "exact" model;
* ``psi_taylor`` quadrature after expanding e^(cx) to second order and x to
                 its Laurent form;
* ``psi_closed`` the incomplete-gamma closed form of ``psi_taylor``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .channel import LOG2E
from .errors import DomainError, NumericalError
from .specialfn import gaussian_q_inv, rayleigh_moment

METHODS = ("exact", "closed")

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-11
QUAD_TOL = 1e-10  # absolute, or relative once the integral exceeds 1


@dataclass(frozen=True)
class ECParams:
    c: float
    d: float
    delta: float
    sinr: float


def _check_inputs(sinr, theta, blocklength):
    if not (math.isfinite(sinr) and sinr > 0):
        raise DomainError(f"sinr must be positive and finite, got {sinr!r}")
    if not (math.isfinite(theta) and theta > 0):
        raise DomainError(f"theta must be positive and finite, got {theta!r}")
    if blocklength <= 0:
        raise DomainError(f"blocklength must be positive, got {blocklength!r}")


def delay_order(theta: float, blocklength: int) -> float:
    return -theta * blocklength / math.log(2.0)


def rate_scale(theta: float, blocklength: int) -> float:
    """delta = theta sqrt(T) log2 e, so that c = delta Q^-1(eps)."""
    return theta * math.sqrt(blocklength) * LOG2E


def ec_params(sinr: float, theta: float, blocklength: int, eps: float) -> ECParams:
    _check_inputs(sinr, theta, blocklength)
    delta = rate_scale(theta, blocklength)
    return ECParams(
        c=delta * gaussian_q_inv(eps),
        d=delay_order(theta, blocklength),
        delta=delta,
        sinr=float(sinr),
    )


def _qinv_array(eps):
    eps = np.asarray(eps, dtype=float)
    if not np.all((eps > 0.0) & (eps < 1.0)):
        raise DomainError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    return -special.ndtri(eps)


def _ret(value, like):
    return float(value) if np.ndim(like) == 0 else value


# ---------------------------------------------------------------------------
# adaptive quadrature (oracles)


def _peak_points(sinr, d, z_max):
    scale = 1.0 / (1.0 + sinr * abs(d))
    return [p for p in (scale, 10 * scale, 100 * scale, 1.0, 10.0) if p < z_max]


def _quad_expectation(integrand, sinr, d, c_pos, what):
    """int_0^inf integrand(z) dz, truncated where the analytic tail bound
    c_pos + d ln(1 + rho z) - z says the remainder is negligible."""
    z_max = 40.0 + c_pos
    for _ in range(8):
        value, abserr, info = integrate.quad(
            integrand,
            0.0,
            z_max,
            points=_peak_points(sinr, d, z_max),
            epsabs=QUAD_EPSABS,
            epsrel=QUAD_EPSREL,
            limit=500,
            full_output=True,
        )[:3]
        tail_bound = math.exp(c_pos + d * math.log1p(sinr * z_max) - z_max)
        if tail_bound <= 1e-16 * max(abs(value), 1e-300):
            break
        z_max *= 2.0
    if abserr > QUAD_TOL * max(1.0, abs(value)) or not math.isfinite(value):
        raise NumericalError(
            f"{what}: quadrature did not reach tolerance "
            f"(value={value!r}, abserr={abserr:.3g}, evaluations={info['neval']}, z_max={z_max})"
        )
    return value


def psi_exact(sinr: float, theta: float, blocklength: int, eps: float) -> float:
    """psi by adaptive quadrature of the defining expectation."""
    p = ec_params(sinr, theta, blocklength, eps)
    q = gaussian_q_inv(eps)
    theta_t = theta * blocklength

    def integrand(z):
        t = sinr * z
        dispersion = -math.expm1(-2.0 * math.log1p(t)) * LOG2E**2
        rate = math.log1p(t) * LOG2E - math.sqrt(dispersion / blocklength) * q
        return math.exp(-theta_t * rate - z)

    k = _quad_expectation(integrand, sinr, p.d, max(p.c, 0.0), "psi_exact")
    return eps + (1.0 - eps) * k


def psi_taylor(sinr: float, theta: float, blocklength: int, eps: float) -> float:
    """psi with e^(cx) ~ 1 + cx + (cx)^2/2 and x ~ 1 - 1/(2(1 + rho z)^2).

    x^2 = 1 - (1 + rho z)^-2 holds exactly, so only the linear term uses the
    Laurent form.
    """
    p = ec_params(sinr, theta, blocklength, eps)
    c, d = p.c, p.d

    def integrand(z):
        w2 = (1.0 + sinr * z) ** -2
        poly = 1.0 + c * (1.0 - 0.5 * w2) + 0.5 * c * c * (1.0 - w2)
        return math.exp(d * math.log1p(sinr * z) - z) * poly

    k = _quad_expectation(integrand, sinr, d, math.log1p(abs(c) + 0.5 * c * c), "psi_taylor")
    return eps + (1.0 - eps) * k


# ---------------------------------------------------------------------------
# closed form


@lru_cache(maxsize=4096)
def j_terms(sinr: float, theta: float, blocklength: int) -> tuple[float, float, float]:
    """(J1, J2, J3) with J(c) = J1 + c J2 + c^2/2 J3.

    J1 = E[(1+rho Z)^d]; the (1+rho Z)^(d-2) moment is
    e^(1/rho) rho^(d-2) Gamma(d-1, 1/rho).
    """
    _check_inputs(sinr, theta, blocklength)
    d = delay_order(theta, blocklength)
    m_d = rayleigh_moment(d, sinr).value
    m_d2 = rayleigh_moment(d - 2.0, sinr).value
    return m_d, m_d - 0.5 * m_d2, m_d - m_d2


def psi_closed(sinr: float, theta: float, blocklength: int, eps):
    """Closed-form psi; accepts scalar or array ``eps``.

    Raises NumericalError where the expansion breaks down (psi <= 0).
    """
    j1, j2, j3 = j_terms(float(sinr), float(theta), int(blocklength))
    c = rate_scale(theta, blocklength) * _qinv_array(eps)
    j = j1 + c * j2 + 0.5 * c * c * j3
    eps_arr = np.asarray(eps, dtype=float)
    value = eps_arr + (1.0 - eps_arr) * j
    if not np.all(np.isfinite(value) & (value > 0.0)):
        raise NumericalError(
            f"closed-form psi left (0, inf) at sinr={sinr}, theta={theta}, "
            f"T={blocklength}, eps={eps!r}: {value!r}"
        )
    return _ret(value, eps)


def psi_deps(sinr: float, theta: float, blocklength: int, eps):
    """Analytic d psi_closed / d eps.

    = 1 - J + (1 - eps) delta q(eps) (J2 + c J3), q = d Q^-1 / d eps.
    """
    j1, j2, j3 = j_terms(float(sinr), float(theta), int(blocklength))
    delta = rate_scale(theta, blocklength)
    qinv = _qinv_array(eps)
    c = delta * qinv
    eps_arr = np.asarray(eps, dtype=float)
    q = -math.sqrt(2.0 * math.pi) * np.exp(0.5 * qinv * qinv)
    j = j1 + c * j2 + 0.5 * c * c * j3
    value = 1.0 - j + (1.0 - eps_arr) * delta * q * (j2 + c * j3)
    return _ret(value, eps)


# ---------------------------------------------------------------------------
# fixed composite rule for the exact integral


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_LOG_TAIL = -75.0


def _rule_breakpoints(sinr, d, c_max):
    u_scale = 1.0 / math.sqrt(1.0 + sinr * abs(d))
    u_max = 6.5
    while c_max + d * math.log1p(sinr * u_max * u_max) - u_max * u_max > _LOG_TAIL:
        u_max *= 1.5
    geometric = u_scale * 2.0 ** np.arange(-10.0, 3.01, 0.5)
    geometric = geometric[geometric < min(1.0, u_max)]
    start = geometric[-1] if geometric.size else 0.0
    n_lin = max(1, int(math.ceil((u_max - start) / 0.5)))
    linear = np.linspace(start, u_max, n_lin + 1)[1:]
    return np.concatenate(([0.0], geometric, linear))


@lru_cache(maxsize=4096)
def _fade_rule(sinr: float, theta: float, blocklength: int):
    """Nodes for K(c) = int (1+rho z)^d e^(c x) e^-z dz in u = sqrt(z).

    Returns (x, log_weight) with K(c) ~= sum exp(log_weight + c x).  In u
    the dispersion factor x = u sqrt(rho (2 + rho u^2)) / (1 + rho u^2) is
    smooth at the origin, so Gauss-Legendre panels converge fast.
    """
    _check_inputs(sinr, theta, blocklength)
    d = delay_order(theta, blocklength)
    c_max = rate_scale(theta, blocklength) * 7.1  # Q^-1(1e-12) ~= 7.03
    edges = _rule_breakpoints(sinr, d, c_max)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    u = (lo + half * (_GL_NODES + 1.0)).ravel()
    w = (half * _GL_WEIGHTS).ravel()
    su2 = sinr * u * u
    x = u * np.sqrt(sinr * (2.0 + su2)) / (1.0 + su2)
    log_weight = np.log(2.0 * u * w) + d * np.log1p(su2) - u * u
    x.setflags(write=False)
    log_weight.setflags(write=False)
    return x, log_weight


def _rule_moments(sinr, theta, blocklength, c):
    x, log_weight = _fade_rule(float(sinr), float(theta), int(blocklength))
    c = np.atleast_1d(c)
    terms = np.exp(log_weight[None, :] + c[:, None] * x[None, :])
    k = terms.sum(axis=1)
    dk = terms @ x
    if not (np.all(np.isfinite(k)) and np.all(k > 0)):
        raise NumericalError(f"fade rule overflowed at sinr={sinr}, theta={theta}, T={blocklength}")
    return k, dk


def psi_rule(sinr: float, theta: float, blocklength: int, eps):
    """psi by the fixed composite rule; vectorised over ``eps``."""
    c = rate_scale(theta, blocklength) * _qinv_array(eps)
    k, _ = _rule_moments(sinr, theta, blocklength, c)
    eps_arr = np.atleast_1d(np.asarray(eps, dtype=float))
    value = eps_arr + (1.0 - eps_arr) * k
    return float(value[0]) if np.ndim(eps) == 0 else value


def psi_rule_deps(sinr: float, theta: float, blocklength: int, eps):
    """d psi / d eps for the exact integral: 1 - K + (1-eps) delta q K'(c)."""
    delta = rate_scale(theta, blocklength)
    qinv = _qinv_array(eps)
    k, dk = _rule_moments(sinr, theta, blocklength, delta * qinv)
    eps_arr = np.atleast_1d(np.asarray(eps, dtype=float))
    q = -math.sqrt(2.0 * math.pi) * np.exp(0.5 * np.atleast_1d(qinv) ** 2)
    value = 1.0 - k + (1.0 - eps_arr) * delta * q * dk
    return float(value[0]) if np.ndim(eps) == 0 else value


# ---------------------------------------------------------------------------
# model dispatch and EC


def _check_method(method):
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}, got {method!r}")


def psi(sinr: float, theta: float, blocklength: int, eps, method: str = "exact"):
    _check_method(method)
    if method == "exact":
        return psi_rule(sinr, theta, blocklength, eps)
    return psi_closed(sinr, theta, blocklength, eps)


def psi_derivative(sinr: float, theta: float, blocklength: int, eps, method: str = "exact"):
    _check_method(method)
    if method == "exact":
        return psi_rule_deps(sinr, theta, blocklength, eps)
    return psi_deps(sinr, theta, blocklength, eps)


def effective_capacity(psi_value, theta: float, blocklength: int):
    """EC = -ln(psi) / (T theta) in bpcu.

    psi above 1 (possible because the normal-approximation rate is not
    clipped at zero) gives a negative EC.
    """
    arr = np.asarray(psi_value, dtype=float)
    if not np.all(np.isfinite(arr) & (arr > 0.0)):
        raise DomainError(
            f"psi must be positive and finite to define EC, got {psi_value!r} "
            f"(theta={theta}, T={blocklength})"
        )
    return _ret(-np.log(arr) / (blocklength * theta), psi_value)


def ec(sinr: float, theta: float, blocklength: int, eps, method: str = "exact"):
    """EC at a given error probability."""
    return effective_capacity(psi(sinr, theta, blocklength, eps, method), theta, blocklength)


def ec_infinite_blocklength(sinr: float, theta: float, blocklength: int) -> float:
    """Shannon-rate EC, -ln E[(1 + rho Z)^d] / (T theta)."""
    _check_inputs(sinr, theta, blocklength)
    moment = rayleigh_moment(delay_order(theta, blocklength), sinr)
    return -moment.log_value / (blocklength * theta)
