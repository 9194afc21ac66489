"""Physical-layer model: collision SINR, finite-blocklength rate, delay outage."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError
from .specialfn import gaussian_q_inv

LOG2E = 1.0 / math.log(2.0)
DISPERSION_LIMIT = LOG2E**2
VALIDATED_MAX_BLOCKLENGTH = 2000


@dataclass(frozen=True)
class NetworkConfig:
    """One scenario: N nodes at per-node SNR ``snr`` (linear).

    ``blocklength`` is in channel uses and ``delay_exponent`` is the QoS
    exponent theta (> 0).
    """

    n_nodes: int = 1
    snr: float = 1.0
    blocklength: int = 1000
    delay_exponent: float = 0.01

    def __post_init__(self):
        if isinstance(self.n_nodes, bool) or int(self.n_nodes) != self.n_nodes or self.n_nodes < 1:
            raise DomainError(f"n_nodes must be an integer >= 1, got {self.n_nodes!r}")
        if not (math.isfinite(self.snr) and self.snr > 0):
            raise DomainError(f"snr must be a positive finite number, got {self.snr!r}")
        if int(self.blocklength) != self.blocklength or self.blocklength <= 0:
            raise DomainError(f"blocklength must be a positive integer, got {self.blocklength!r}")
        if not (math.isfinite(self.delay_exponent) and self.delay_exponent > 0):
            raise DomainError(
                f"delay_exponent must be positive and finite, got {self.delay_exponent!r}"
            )
        object.__setattr__(self, "n_nodes", int(self.n_nodes))
        object.__setattr__(self, "blocklength", int(self.blocklength))
        object.__setattr__(self, "snr", float(self.snr))
        object.__setattr__(self, "delay_exponent", float(self.delay_exponent))
        if self.blocklength >= VALIDATED_MAX_BLOCKLENGTH:
            warnings.warn(
                f"blocklength {self.blocklength} is outside the short-packet regime "
                f"(< {VALIDATED_MAX_BLOCKLENGTH}) the dispersion model targets",
                stacklevel=3,
            )

    @property
    def theta(self) -> float:
        return self.delay_exponent

    def replace(self, **changes) -> "NetworkConfig":
        fields = dict(
            n_nodes=self.n_nodes,
            snr=self.snr,
            blocklength=self.blocklength,
            delay_exponent=self.delay_exponent,
        )
        fields.update(changes)
        return NetworkConfig(**fields)


@dataclass(frozen=True)
class DelayModel:
    max_delay: float
    outage_prob: float

    def __post_init__(self):
        if not self.max_delay > 0:
            raise DomainError(f"max_delay must be positive, got {self.max_delay!r}")
        if not 0.0 < self.outage_prob < 1.0:
            raise DomainError(f"outage_prob must lie in (0, 1), got {self.outage_prob!r}")


def sinr_collision(cfg: NetworkConfig) -> float:
    """SINR of one node when the other N-1 interfere: rho / (1 + rho (N-1))."""
    if cfg.n_nodes == 1:
        return cfg.snr
    return cfg.snr / (1.0 + cfg.snr * (cfg.n_nodes - 1))


def _nonnegative(name: str, t: float) -> float:
    t = float(t)
    if not t >= 0.0:
        raise DomainError(f"{name} must be >= 0, got {t!r}")
    return t


def shannon_capacity(t: float) -> float:
    """log2(1 + t) in bits per channel use."""
    t = _nonnegative("t", t)
    return math.log1p(t) * LOG2E


def channel_dispersion(t: float) -> float:
    """(1 - (1+t)^-2) (log2 e)^2."""
    t = _nonnegative("t", t)
    return -math.expm1(-2.0 * math.log1p(t)) * DISPERSION_LIMIT


def achievable_rate(sinr: float, fade: float, blocklength: int, eps: float) -> float:
    """Normal-approximation rate C - sqrt(V/T) Q^-1(eps).

    Not clipped at zero: for small fades the result is negative.
    """
    if not sinr > 0:
        raise DomainError(f"sinr must be positive, got {sinr!r}")
    if blocklength <= 0:
        raise DomainError(f"blocklength must be positive, got {blocklength!r}")
    t = sinr * _nonnegative("fade", fade)
    q = gaussian_q_inv(eps)
    return shannon_capacity(t) - math.sqrt(channel_dispersion(t) / blocklength) * q


def delay_outage_probability(ec: float, theta: float, d_max: float) -> float:
    """P(delay >= d_max) ~= exp(-theta * EC * d_max)."""
    if not (ec > 0 and theta > 0 and d_max > 0):
        raise DomainError(f"ec, theta and d_max must be positive, got {ec!r}, {theta!r}, {d_max!r}")
    return math.exp(-theta * ec * d_max)


def max_delay_for_outage(ec: float, theta: float, p_out: float) -> float:
    """Smallest delay bound meeting outage probability ``p_out``."""
    if not (ec > 0 and theta > 0):
        raise DomainError(f"ec and theta must be positive, got {ec!r}, {theta!r}")
    if not 0.0 < p_out < 1.0:
        raise DomainError(f"p_out must lie in (0, 1), got {p_out!r}")
    return -math.log(p_out) / (theta * ec)
