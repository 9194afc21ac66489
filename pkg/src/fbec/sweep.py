"""Parameter sweeps and the CSV table format shared with the figure generators.

A table is a header, numeric rows in grid order, and a metadata dict that
is written as ``# key: <json>`` lines above the header.  Floats are written
with ``repr`` so output is bit-identical across runs and thread counts.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .channel import NetworkConfig, delay_outage_probability, sinr_collision
from .compensate import Priorities, joint_plan, loss_factors, others_sinr_after_boost
from .effcap import METHODS, ec_infinite_blocklength, effective_capacity, psi
from .errors import DomainError, NumericalError
from .optimize import URConstraint, max_ec, optimal_eps

log = logging.getLogger(__name__)

AXES = ("eps", "n_nodes", "theta", "snr", "rho_s_op", "d_max")


@dataclass
class SweepResult:
    header: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        k = self.header.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)

    def to_csv(self) -> str:
        lines = [f"# fbec_version: {json.dumps(__version__)}"]
        for key, value in self.metadata.items():
            lines.append(f"# {key}: {json.dumps(value, sort_keys=True)}")
        lines.append(",".join(self.header))
        for row in self.rows:
            lines.append(",".join(_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv())


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def read_csv(path) -> SweepResult:
    """Inverse of ``SweepResult.write`` (metadata values are JSON-decoded)."""
    metadata, header, rows = {}, None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            metadata[key] = json.loads(value)
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(tuple(float(v) for v in line.split(",")))
    metadata.pop("fbec_version", None)
    return SweepResult(header or [], rows, metadata)


def evaluate_grid(
    fn: Callable[[float], Sequence[float]],
    grid: Sequence,
    jobs: int = 1,
) -> tuple[list[tuple], list[dict]]:
    """Apply ``fn`` to each grid point; failures are logged and dropped.

    Points run concurrently when ``jobs > 1`` but rows come back in grid order.
    """

    def guarded(x):
        try:
            row = tuple(fn(x))
        except (DomainError, NumericalError, ArithmeticError, ValueError) as exc:
            return None, f"{type(exc).__name__}: {exc}"
        if not all(math.isfinite(float(v)) for v in row):
            return None, f"non-finite value in {row!r}"
        return row, None

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(guarded, grid))
    else:
        outcomes = [guarded(x) for x in grid]

    rows, dropped = [], []
    for x, (row, reason) in zip(grid, outcomes):
        if row is None:
            log.warning("dropping grid point %r: %s", x, reason)
            dropped.append({"point": _jsonable(x), "reason": reason})
        else:
            rows.append(row)
    return rows, dropped


def _jsonable(x):
    return int(x) if isinstance(x, (int, np.integer)) else float(x)


def network_dict(cfg: NetworkConfig) -> dict:
    return {
        "n_nodes": cfg.n_nodes,
        "snr_linear": cfg.snr,
        "blocklength": cfg.blocklength,
        "theta": cfg.delay_exponent,
    }


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    steps: int
    base: NetworkConfig
    constraint: Optional[URConstraint] = None
    priorities: Optional[Priorities] = None
    method: str = "exact"
    log_spacing: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise DomainError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        if isinstance(self.steps, bool) or int(self.steps) != self.steps or self.steps < 2:
            raise DomainError(f"steps must be an integer >= 2, got {self.steps!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise DomainError(f"need finite start < stop, got {self.start!r}, {self.stop!r}")
        if self.log_spacing and self.start <= 0:
            raise DomainError("log spacing needs start > 0")
        lo, hi = self.start, self.stop
        if self.axis == "eps" and not (0 < lo and hi < 1):
            raise DomainError(f"eps range must lie inside (0, 1), got [{lo}, {hi}]")
        if self.axis in ("theta", "snr", "d_max") and lo <= 0:
            raise DomainError(f"{self.axis} range must be positive, got start={lo}")
        if self.axis == "n_nodes":
            if lo < 1 or lo != int(lo) or hi != int(hi):
                raise DomainError(f"n_nodes range must be integers >= 1, got [{lo}, {hi}]")
            if self.steps > hi - lo + 1:
                raise DomainError(f"{self.steps} steps do not fit in the integer range [{lo}, {hi}]")
        if self.axis == "rho_s_op":
            if self.base.n_nodes < 2:
                raise DomainError("rho_s_op sweeps need n_nodes >= 2")
            rho_s, rho_i = others_sinr_after_boost(self.base), sinr_collision(self.base)
            if lo < rho_s * (1 - 1e-12) or hi > rho_i * (1 + 1e-12):
                raise DomainError(f"rho_s_op range must lie inside [{rho_s!r}, {rho_i!r}]")

    def grid(self) -> list:
        if self.log_spacing:
            values = np.geomspace(self.start, self.stop, self.steps)
        else:
            values = np.linspace(self.start, self.stop, self.steps)
        if self.axis == "n_nodes":
            ints = [int(v) for v in np.round(values)]
            if len(set(ints)) != len(ints):
                raise DomainError("n_nodes grid has repeated values after rounding; use fewer steps")
            return ints
        values[0], values[-1] = self.start, self.stop
        return [float(v) for v in values]

    def metadata(self) -> dict:
        meta = {
            "command": "sweep",
            "axis": self.axis,
            "range": [self.start, self.stop, self.steps],
            "spacing": "log" if self.log_spacing else "linear",
            "config": network_dict(self.base),
            "method": self.method,
            "target_eps": None if self.constraint is None else self.constraint.target_eps,
        }
        if self.priorities is not None:
            meta["priorities"] = list(self.priorities)
        return meta


def _optimum_columns(spec: SweepSpec, sinr: float, cfg: NetworkConfig) -> list:
    free = optimal_eps(sinr, cfg.delay_exponent, cfg.blocklength, spec.method)
    out = [free.eps_star, free.ec_value]
    if spec.constraint is not None:
        bound = max_ec(sinr, cfg.delay_exponent, cfg.blocklength, spec.constraint, spec.method)
        out += [bound.eps_star, bound.ec_value]
    return out


def _plan(spec: SweepSpec):
    """Header and per-point function for the sweep axis."""
    base, method = spec.base, spec.method
    theta, T = base.delay_exponent, base.blocklength
    opt_cols = ["eps_star", "ec_max"] + (["eps_op", "ec_op"] if spec.constraint else [])

    if spec.axis == "eps":
        sinr = sinr_collision(base)

        def row(x):
            p = psi(sinr, theta, T, x, method)
            return [x, p, effective_capacity(p, theta, T)]

        return ["eps", "psi", "ec"], row

    if spec.axis == "n_nodes":

        def row(n):
            cfg = base.replace(n_nodes=n)
            rep = loss_factors(cfg, spec.constraint, method)
            return [n, rep.rho_i] + _optimum_columns(spec, rep.rho_i, cfg) + [
                rep.alpha, rep.alpha_c, rep.gamma_c, rep.alpha_t,
            ]

        return ["n_nodes", "sinr"] + opt_cols + ["alpha", "alpha_c", "gamma_c", "alpha_t"], row

    if spec.axis == "theta":
        sinr = sinr_collision(base)

        def row(x):
            cfg = base.replace(delay_exponent=x)
            return [x] + _optimum_columns(spec, sinr, cfg) + [ec_infinite_blocklength(sinr, x, T)]

        return ["theta"] + opt_cols + ["ec_infinite_blocklength"], row

    if spec.axis == "snr":

        def row(x):
            cfg = base.replace(snr=x)
            sinr = sinr_collision(cfg)
            return [x, sinr] + _optimum_columns(spec, sinr, cfg)

        return ["snr", "sinr"] + opt_cols, row

    if spec.axis == "rho_s_op":
        priorities = spec.priorities or Priorities()

        def row(x):
            plan = joint_plan(base, x, priorities, spec.constraint, method)
            return [x, plan.rho_c_op, plan.alpha_c_op, plan.theta2, plan.eta]

        return ["rho_s_op", "rho_c_op", "alpha_c_op", "theta2", "eta"], row

    # d_max: outage of the colliding node at its operating EC
    ec_op = max_ec(sinr_collision(base), theta, T, spec.constraint, method).ec_value

    def row(x):
        return [x, delay_outage_probability(ec_op, theta, x)]

    return ["d_max", "p_out"], row


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every grid point; raises NumericalError if none succeed."""
    header, fn = _plan(spec)
    grid = spec.grid()
    rows, dropped = evaluate_grid(fn, grid, jobs)
    meta = spec.metadata()
    meta["dropped"] = dropped
    if not rows:
        raise NumericalError(f"all {len(grid)} sweep points failed; first: {dropped[0]['reason']}")
    return SweepResult(header, rows, meta)
