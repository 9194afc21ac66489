"""JSON scenario files.

    {"n_nodes": 5, "snr_linear": 2, "blocklength": 1000, "theta": 0.01,
     "target_eps": 1e-3, "priorities": [1, 4], "method": "exact"}

Exactly one of ``snr_linear`` / ``snr_db`` must be given.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .channel import NetworkConfig
from .compensate import Priorities
from .effcap import METHODS
from .errors import DomainError
from .optimize import URConstraint

REQUIRED = ("n_nodes", "blocklength", "theta")
OPTIONAL = ("snr_linear", "snr_db", "target_eps", "priorities", "method")


class ConfigError(DomainError):
    """A scenario file is malformed; the message names the offending field."""


@dataclass(frozen=True)
class Scenario:
    network: NetworkConfig
    constraint: Optional[URConstraint] = None
    priorities: Optional[Priorities] = None
    method: str = "exact"

    def as_dict(self) -> dict:
        out = {
            "n_nodes": self.network.n_nodes,
            "snr_linear": self.network.snr,
            "blocklength": self.network.blocklength,
            "theta": self.network.delay_exponent,
            "method": self.method,
        }
        if self.constraint is not None:
            out["target_eps"] = self.constraint.target_eps
        if self.priorities is not None:
            out["priorities"] = list(self.priorities)
        return out


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _number(data, key, kind=float):
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{key}' must be a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(f"field '{key}' must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"field '{key}' must be finite, got {value!r}")
    return kind(value)


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - set(REQUIRED) - set(OPTIONAL))
    if unknown:
        raise ConfigError(f"unknown field '{unknown[0]}'")
    for key in REQUIRED:
        if key not in data:
            raise ConfigError(f"missing required field '{key}'")

    if ("snr_linear" in data) == ("snr_db" in data):
        raise ConfigError("give exactly one of the fields 'snr_linear' or 'snr_db'")
    if "snr_linear" in data:
        snr = _number(data, "snr_linear")
        if snr <= 0:
            raise ConfigError(f"field 'snr_linear' must be positive, got {snr!r}")
    else:
        snr = db_to_linear(_number(data, "snr_db"))

    n_nodes = _number(data, "n_nodes", int)
    blocklength = _number(data, "blocklength", int)
    theta = _number(data, "theta")
    for key, value, ok in (
        ("n_nodes", n_nodes, n_nodes >= 1),
        ("blocklength", blocklength, blocklength > 0),
        ("theta", theta, theta > 0),
    ):
        if not ok:
            raise ConfigError(f"field '{key}' is out of range: {value!r}")
    network = NetworkConfig(n_nodes, snr, blocklength, theta)

    constraint = None
    if data.get("target_eps") is not None:
        target = _number(data, "target_eps")
        if not 0 < target < 1:
            raise ConfigError(f"field 'target_eps' must lie in (0, 1), got {target!r}")
        constraint = URConstraint(target)

    priorities = None
    if data.get("priorities") is not None:
        raw = data["priorities"]
        if isinstance(raw, dict):
            raw = [raw.get("eta_alpha"), raw.get("eta_theta")]
        if (
            not isinstance(raw, (list, tuple))
            or len(raw) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)
            or min(raw) < 0
        ):
            raise ConfigError(f"field 'priorities' must be two non-negative numbers, got {data['priorities']!r}")
        priorities = Priorities(float(raw[0]), float(raw[1]))

    method = data.get("method", "exact")
    if method not in METHODS:
        raise ConfigError(f"field 'method' must be one of {METHODS}, got {method!r}")
    return Scenario(network, constraint, priorities, method)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)
