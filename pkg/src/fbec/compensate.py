"""Restoring one node's EC under collisions.

Three strategies are covered: boosting the node's SNR (power control),
relaxing its delay exponent (graceful degradation), and a mix of the two
chosen by maximising eta = eta_alpha * alpha_co + eta_theta * theta2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import optimize as sopt

from .channel import NetworkConfig, sinr_collision
from .errors import DomainError, InfeasibleError, NumericalError
from .optimize import URConstraint, golden_section, max_ec

THETA_MIN = 1e-6
ROOT_TOL = 1e-8
_BOUND_SLACK = 1e-12


class Priorities(NamedTuple):
    eta_alpha: float = 1.0
    eta_theta: float = 0.0

    @classmethod
    def parse(cls, text: str) -> "Priorities":
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 2:
            raise DomainError(f"priorities must look like 'eta_alpha,eta_theta', got {text!r}")
        return cls.checked(float(parts[0]), float(parts[1]))

    @classmethod
    def checked(cls, eta_alpha: float, eta_theta: float) -> "Priorities":
        if not (eta_alpha >= 0 and eta_theta >= 0):
            raise DomainError(f"priority factors must be >= 0, got {eta_alpha!r}, {eta_theta!r}")
        return cls(float(eta_alpha), float(eta_theta))


@dataclass(frozen=True)
class CompensationReport:
    rho_i: float
    rho_c: float
    rho_s: float
    alpha: float
    alpha_c: float
    gamma_c: float
    alpha_t: float
    ec_free: float
    ec_collision: float
    ec_others: float


@dataclass(frozen=True)
class JointPlan:
    rho_s_op: float
    rho_c_op: float
    alpha_c_op: float
    theta2: float
    eta: float
    priorities: Priorities
    compensated_sinr: float
    ec_target: float


def power_control_snr(cfg: NetworkConfig) -> float:
    """SNR that gives the compensating node its interference-free SINR."""
    return cfg.snr * (1.0 + cfg.snr * (cfg.n_nodes - 1))


def _require_others(cfg: NetworkConfig):
    if cfg.n_nodes < 2:
        raise DomainError("at least two nodes are needed for there to be 'other' nodes")


def others_sinr_forms(cfg: NetworkConfig) -> tuple[float, float]:
    """The two algebraic forms of the others' SINR after one node boosts."""
    _require_others(cfg)
    rho, n = cfg.snr, cfg.n_nodes
    direct = rho / (1.0 + power_control_snr(cfg) + rho * (n - 2))
    expanded = rho / (1.0 + rho * (rho + 1.0) * (n - 1))
    return direct, expanded


def others_sinr_after_boost(cfg: NetworkConfig) -> float:
    direct, expanded = others_sinr_forms(cfg)
    if abs(direct - expanded) > 1e-14 * max(abs(expanded), 1e-300) * 4:
        raise NumericalError(f"others' SINR forms disagree: {direct!r} vs {expanded!r}")
    return expanded


def _ec_max(sinr, cfg, theta=None, constraint=None, method="exact"):
    theta = cfg.delay_exponent if theta is None else theta
    return max_ec(sinr, theta, cfg.blocklength, constraint, method).ec_value


def loss_factors(
    cfg: NetworkConfig,
    constraint: Optional[URConstraint] = None,
    method: str = "exact",
) -> CompensationReport:
    """Collision loss alpha, compensation loss alpha_c, gain gamma_c, total alpha_t.

    Every EC is taken at its own optimal eps; a supplied constraint is
    applied to all of them.  With a single node there is nothing to lose
    and all factors are 1.
    """
    rho = cfg.snr
    rho_i = sinr_collision(cfg)
    ec_free = _ec_max(rho, cfg, constraint=constraint, method=method)
    ec_collision = _ec_max(rho_i, cfg, constraint=constraint, method=method)
    if cfg.n_nodes == 1:
        return CompensationReport(rho, rho, rho, 1.0, 1.0, 1.0, 1.0, ec_free, ec_free, ec_free)
    rho_s = others_sinr_after_boost(cfg)
    ec_others = _ec_max(rho_s, cfg, constraint=constraint, method=method)
    alpha = ec_collision / ec_free
    alpha_c = ec_others / ec_collision
    return CompensationReport(
        rho_i=rho_i,
        rho_c=power_control_snr(cfg),
        rho_s=rho_s,
        alpha=alpha,
        alpha_c=alpha_c,
        gamma_c=1.0 / alpha,
        alpha_t=alpha * alpha_c,
        ec_free=ec_free,
        ec_collision=ec_collision,
        ec_others=ec_others,
    )


def verify_power_restoration(cfg: NetworkConfig, method: str = "exact", tol: float = 1e-12) -> bool:
    """Boosted node's EC equals the single-node EC at the original SNR."""
    boosted = power_control_snr(cfg) / (1.0 + cfg.snr * (cfg.n_nodes - 1))
    ec_boosted = _ec_max(boosted, cfg, method=method)
    ec_alone = _ec_max(cfg.snr, cfg, method=method)
    return abs(ec_boosted - ec_alone) < tol


def _solve_theta(sinr, ec_target, cfg, constraint, method, what):
    """Delay exponent in (THETA_MIN, theta] at which EC_max(sinr) hits ec_target."""
    theta_hi = cfg.delay_exponent

    def gap(theta):
        return _ec_max(sinr, cfg, theta, constraint, method) - ec_target

    top = gap(theta_hi)
    if top >= -ROOT_TOL * 1e-3:
        return theta_hi
    bottom = gap(THETA_MIN)
    if bottom < 0.0:
        raise InfeasibleError(
            f"{what}: EC at sinr={sinr:.6g} stays below the target {ec_target:.6g} "
            f"even at theta={THETA_MIN} (gap {bottom:.3g})"
        )
    root = sopt.brentq(gap, THETA_MIN, theta_hi, xtol=1e-15, rtol=1e-13)
    residual = gap(root)
    if abs(residual) > ROOT_TOL:
        raise NumericalError(f"{what}: root at theta={root!r} leaves residual {residual:.3g}")
    return root


def graceful_theta(
    cfg: NetworkConfig,
    constraint: Optional[URConstraint] = None,
    method: str = "exact",
) -> float:
    """Relaxed delay exponent giving the colliding node its collision-free EC_max."""
    if cfg.n_nodes == 1:
        return cfg.delay_exponent
    target = _ec_max(cfg.snr, cfg, constraint=constraint, method=method)
    return _solve_theta(sinr_collision(cfg), target, cfg, constraint, method, "graceful_theta")


def joint_plan(
    cfg: NetworkConfig,
    rho_s_op: float,
    priorities: Priorities = Priorities(),
    constraint: Optional[URConstraint] = None,
    method: str = "exact",
) -> JointPlan:
    """Partial power boost leaving others at SINR ``rho_s_op``, rest via theta."""
    _require_others(cfg)
    rho, n = cfg.snr, cfg.n_nodes
    rho_i = sinr_collision(cfg)
    rho_s = others_sinr_after_boost(cfg)
    if not rho_s * (1 - _BOUND_SLACK) <= rho_s_op <= rho_i * (1 + _BOUND_SLACK):
        raise DomainError(f"rho_s_op={rho_s_op!r} must lie in [{rho_s!r}, {rho_i!r}]")
    rho_c_op = rho / rho_s_op - 1.0 - rho * (n - 2)
    ec_collision = _ec_max(rho_i, cfg, constraint=constraint, method=method)
    alpha_c_op = _ec_max(rho_s_op, cfg, constraint=constraint, method=method) / ec_collision
    compensated = rho_c_op / (1.0 + rho * (n - 1))
    target = _ec_max(rho, cfg, constraint=constraint, method=method)
    theta2 = _solve_theta(compensated, target, cfg, constraint, method, "joint_plan")
    return JointPlan(
        rho_s_op=float(rho_s_op),
        rho_c_op=rho_c_op,
        alpha_c_op=alpha_c_op,
        theta2=theta2,
        eta=priorities.eta_alpha * alpha_c_op + priorities.eta_theta * theta2,
        priorities=priorities,
        compensated_sinr=compensated,
        ec_target=target,
    )


def joint_grid(
    cfg: NetworkConfig,
    priorities: Priorities = Priorities(),
    points: int = 200,
    constraint: Optional[URConstraint] = None,
    method: str = "exact",
) -> list[JointPlan]:
    """Joint plans on an even grid of rho_s_op over [rho_s, rho_i]."""
    grid = np.linspace(others_sinr_after_boost(cfg), sinr_collision(cfg), points)
    return [joint_plan(cfg, float(r), priorities, constraint, method) for r in grid]


def optimize_joint(
    cfg: NetworkConfig,
    priorities: Priorities = Priorities(),
    points: int = 200,
    constraint: Optional[URConstraint] = None,
    method: str = "exact",
) -> JointPlan:
    """Operating point maximising eta: dense grid, then golden-section refinement."""
    if points < 3:
        raise DomainError(f"need at least 3 grid points, got {points}")
    plans = joint_grid(cfg, priorities, points, constraint, method)
    etas = [p.eta for p in plans]
    k = int(np.argmax(etas))
    lo = plans[max(k - 1, 0)].rho_s_op
    hi = plans[min(k + 1, len(plans) - 1)].rho_s_op
    refined = golden_section(
        lambda r: -joint_plan(cfg, r, priorities, constraint, method).eta,
        lo,
        hi,
        tol=1e-9 * max(hi, 1e-12),
    )
    best = joint_plan(cfg, refined.x, priorities, constraint, method)
    return best if best.eta >= plans[k].eta else plans[k]
