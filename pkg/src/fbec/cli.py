"""Command-line front end.

    fbec ec --config net.json [--eps-target 1e-3]
    fbec figure fig2 --out fig2.csv
    fbec sweep --config net.json --axis eps --start 1e-6 --stop 0.5 --steps 200 --log --out eps.csv
    fbec compensate joint --config net.json --priorities 1,4

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import __version__
from .channel import max_delay_for_outage, sinr_collision
from .compensate import (
    Priorities,
    graceful_theta,
    joint_plan,
    loss_factors,
    optimize_joint,
    verify_power_restoration,
)
from .config import ConfigError, Scenario, load_scenario
from .effcap import METHODS
from .errors import DomainError, NumericalError
from .figures import FIGURES, figure
from .optimize import URConstraint, ec_sacrifice_ratio, max_ec, optimal_eps
from .sweep import AXES, SweepSpec, run_sweep

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("fbec")


def _emit(pairs, out=None):
    text = "".join(f"{k}: {_fmt(v)}\n" for k, v in pairs)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _scenario(args) -> Scenario:
    sc = load_scenario(args.config)
    if args.eps_target is not None:
        sc = replace(sc, constraint=URConstraint(args.eps_target))
    if args.priorities is not None:
        sc = replace(sc, priorities=Priorities.parse(args.priorities))
    if args.method is not None:
        sc = replace(sc, method=args.method)
    return sc


def _write_table(result, out):
    if out:
        result.write(out)
        log.info("wrote %d rows to %s", len(result.rows), out)
    else:
        sys.stdout.write(result.to_csv())


def cmd_ec(args) -> int:
    sc = _scenario(args)
    cfg = sc.network
    rho_i = sinr_collision(cfg)
    free = optimal_eps(rho_i, cfg.theta, cfg.blocklength, sc.method)
    pairs = [
        ("snr_linear", cfg.snr),
        ("n_nodes", cfg.n_nodes),
        ("blocklength", cfg.blocklength),
        ("theta", cfg.theta),
        ("method", sc.method),
        ("rho_i", rho_i),
        ("eps_star", free.eps_star),
        ("ec_max", free.ec_value),
    ]
    if sc.constraint is not None:
        bound = max_ec(rho_i, cfg.theta, cfg.blocklength, sc.constraint, sc.method)
        pairs += [
            ("target_eps", sc.constraint.target_eps),
            ("constraint_active", bound.constrained),
            ("eps_op", bound.eps_star),
            ("ec_op", bound.ec_value),
            ("sacrifice_ratio", ec_sacrifice_ratio(rho_i, cfg.theta, cfg.blocklength, sc.constraint, sc.method)),
        ]
    _emit(pairs, args.out)
    return EXIT_OK


def cmd_figure(args) -> int:
    method = args.method or "exact"
    result = figure(args.figure_id, points=args.points, method=method, jobs=args.jobs)
    _write_table(result, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = _scenario(args)
    spec = SweepSpec(
        axis=args.axis,
        start=args.start,
        stop=args.stop,
        steps=args.steps,
        base=sc.network,
        constraint=sc.constraint,
        priorities=sc.priorities,
        method=sc.method,
        log_spacing=args.log,
    )
    result = run_sweep(spec, jobs=args.jobs)
    _write_table(result, args.out)
    return EXIT_OK


def cmd_compensate(args) -> int:
    sc = _scenario(args)
    cfg = sc.network
    pairs = [("strategy", args.strategy), ("rho_i", sinr_collision(cfg))]
    if args.strategy == "power":
        rep = loss_factors(cfg, sc.constraint, sc.method)
        pairs += [
            ("rho_c", rep.rho_c),
            ("rho_s", rep.rho_s),
            ("alpha", rep.alpha),
            ("alpha_c", rep.alpha_c),
            ("gamma_c", rep.gamma_c),
            ("alpha_t", rep.alpha_t),
            ("ec_free", rep.ec_free),
            ("ec_collision", rep.ec_collision),
            ("ec_others", rep.ec_others),
            ("restores_free_ec", verify_power_restoration(cfg, sc.method)),
        ]
    elif args.strategy == "delay":
        theta_i = graceful_theta(cfg, sc.constraint, sc.method)
        ec_before = max_ec(sinr_collision(cfg), cfg.theta, cfg.blocklength, sc.constraint, sc.method).ec_value
        ec_after = max_ec(cfg.snr, cfg.theta, cfg.blocklength, sc.constraint, sc.method).ec_value
        pairs += [
            ("theta", cfg.theta),
            ("theta_i", theta_i),
            ("ec_before", ec_before),
            ("ec_after", ec_after),
            ("p_out", args.p_out),
            ("d_max_before", max_delay_for_outage(ec_before, cfg.theta, args.p_out)),
            ("d_max_after", max_delay_for_outage(ec_after, theta_i, args.p_out)),
        ]
    else:
        pr = sc.priorities or Priorities()
        if args.rho_s_op is not None:
            plan = joint_plan(cfg, args.rho_s_op, pr, sc.constraint, sc.method)
        else:
            plan = optimize_joint(cfg, pr, args.points or 200, sc.constraint, sc.method)
        pairs += [
            ("eta_alpha", pr.eta_alpha),
            ("eta_theta", pr.eta_theta),
            ("rho_s_op", plan.rho_s_op),
            ("rho_c_op", plan.rho_c_op),
            ("alpha_c_op", plan.alpha_c_op),
            ("theta2", plan.theta2),
            ("eta", plan.eta),
        ]
    _emit(pairs, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--eps-target", type=float, help="reliability target eps_t")
    common.add_argument("--priorities", help="eta_alpha,eta_theta for joint compensation")
    common.add_argument("--method", choices=METHODS, help="psi model (default: exact)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for grid evaluation")
    common.add_argument("--points", type=int, help="grid resolution")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fbec", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ec", parents=[common], help="optimal eps and EC for one scenario")
    p.set_defaults(func=cmd_ec, needs_config=True)

    p = sub.add_parser("figure", parents=[common], help="write the data behind a reference figure")
    p.add_argument("figure_id", choices=FIGURES)
    p.set_defaults(func=cmd_figure, needs_config=False)

    p = sub.add_parser("sweep", parents=[common], help="evaluate a scenario over one parameter")
    p.add_argument("--axis", required=True, choices=AXES)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--log", action="store_true", help="geometric spacing")
    p.set_defaults(func=cmd_sweep, needs_config=True)

    p = sub.add_parser("compensate", parents=[common], help="interference compensation strategies")
    p.add_argument("strategy", choices=("power", "delay", "joint"))
    p.add_argument("--p-out", type=float, default=1e-3, help="delay outage target (delay strategy)")
    p.add_argument("--rho-s-op", type=float, help="fixed operating SINR of the others (joint strategy)")
    p.set_defaults(func=cmd_compensate, needs_config=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.needs_config and not args.config:
        parser.error(f"{args.command} needs --config")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    if args.points is not None and args.points < 3:
        parser.error("--points must be >= 3")
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"fbec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        print(f"fbec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
