"""Finite-blocklength effective capacity of colliding short-packet nodes."""

__version__ = "0.1.0"

from .channel import NetworkConfig, achievable_rate, sinr_collision  # noqa: E402
from .compensate import (  # noqa: E402
    Priorities,
    graceful_theta,
    joint_plan,
    loss_factors,
    optimize_joint,
    power_control_snr,
)
from .effcap import ec, effective_capacity, psi, psi_closed, psi_exact, psi_taylor  # noqa: E402
from .errors import DomainError, InfeasibleError, NumericalError  # noqa: E402
from .optimize import URConstraint, constrained_optimal_eps, max_ec, optimal_eps  # noqa: E402

__all__ = [
    "NetworkConfig", "achievable_rate", "sinr_collision",
    "Priorities", "graceful_theta", "joint_plan", "loss_factors", "optimize_joint", "power_control_snr",
    "ec", "effective_capacity", "psi", "psi_closed", "psi_exact", "psi_taylor",
    "DomainError", "InfeasibleError", "NumericalError",
    "URConstraint", "constrained_optimal_eps", "max_ec", "optimal_eps",
]
