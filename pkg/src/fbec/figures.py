"""Curve families for the reference figures, as ``SweepResult`` tables.

Each generator takes its scenario defaults from ``FIGURE_DEFAULTS`` and
writes them, plus derived landmarks (optima, crossing delays), into the
table metadata.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .channel import NetworkConfig, delay_outage_probability, max_delay_for_outage, sinr_collision
from .compensate import (
    Priorities,
    graceful_theta,
    joint_plan,
    loss_factors,
    optimize_joint,
    others_sinr_after_boost,
    power_control_snr,
)
from .effcap import ec
from .errors import DomainError, NumericalError
from .optimize import URConstraint, max_ec, optimal_eps
from .sweep import SweepResult, evaluate_grid

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10")

FIGURE_DEFAULTS = {
    "fig2": dict(blocklength=1000, snr=2.0, theta=0.01, n_nodes=[1, 5, 10], eps_range=[1e-6, 0.5]),
    # the target and exponents are not pinned down by the source figure;
    # these give the roughly halved operational EC it describes
    "fig3": dict(blocklength=1000, snr_db=10.0, thetas=[0.001, 0.01], target_eps=1e-3, n_nodes=[1, 30]),
    "fig4": dict(blocklength=1000, snr=1.0, theta=0.1, n_nodes=5, eps_range=[1e-6, 0.5]),
    "fig5": dict(blocklength=1000, snr=1.0, thetas=[0.1, 0.001], n_nodes=[2, 30]),
    "fig6": dict(blocklength=1000, snr=1.0, thetas=[0.1, 0.001], n_nodes=[2, 30]),
    "fig7": dict(blocklength=1000, snr=1.0, theta=0.05, n_nodes=5, d_max=[40.0, 8000.0], p_out=1e-3),
    "fig8": dict(blocklength=[700, 1000], snr=1.0, theta=0.1, n_nodes=5, p_out=1e-3),
    "fig9": dict(blocklength=1000, snr=2.0, theta=0.1, n_nodes=15, priorities=[1.0, 4.0]),
    "fig10": dict(
        blocklength=1000, snr=2.0, theta=0.1, n_nodes=15, priorities=[1.0, 4.0], eps_range=[1e-6, 0.5]
    ),
}


def _tag(x) -> str:
    return f"{x:g}"


def _eps_grid(eps_range, points):
    return [float(v) for v in np.geomspace(eps_range[0], eps_range[1], points)]


def _finish(name, header, rows, dropped, meta, method, points):
    if not rows:
        raise NumericalError(f"{name}: every grid point failed")
    meta = dict(figure=name, method=method, points=points, **meta, dropped=dropped)
    return SweepResult(header, rows, meta)


def fig2(points=200, method="exact", jobs=1) -> SweepResult:
    p = FIGURE_DEFAULTS["fig2"]
    T, theta = p["blocklength"], p["theta"]
    sinrs = [sinr_collision(NetworkConfig(n, p["snr"], T, theta)) for n in p["n_nodes"]]
    header = ["eps"]
    for n in p["n_nodes"]:
        header += [f"ec_exact_N{n}", f"ec_closed_N{n}"]

    def row(eps):
        out = [eps]
        for s in sinrs:
            out += [ec(s, theta, T, eps, "exact"), ec(s, theta, T, eps, "closed")]
        return out

    rows, dropped = evaluate_grid(row, _eps_grid(p["eps_range"], points), jobs)
    optima = {}
    for n, s in zip(p["n_nodes"], sinrs):
        r = optimal_eps(s, theta, T, method)
        optima[f"N{n}"] = {"sinr": s, "eps_star": r.eps_star, "ec_max": r.ec_value}
    return _finish("fig2", header, rows, dropped, dict(defaults=p, optima=optima), method, points)


def fig3(points=None, method="exact", jobs=1) -> SweepResult:
    p = FIGURE_DEFAULTS["fig3"]
    snr = 10.0 ** (p["snr_db"] / 10.0)
    constraint = URConstraint(p["target_eps"])
    header = ["n_nodes"]
    for th in p["thetas"]:
        header += [f"ec_max_theta{_tag(th)}", f"ec_op_theta{_tag(th)}", f"ratio_theta{_tag(th)}"]

    def row(n):
        s = sinr_collision(NetworkConfig(n, snr, p["blocklength"], p["thetas"][0]))
        out = [n]
        for th in p["thetas"]:
            free = optimal_eps(s, th, p["blocklength"], method).ec_value
            op = max_ec(s, th, p["blocklength"], constraint, method).ec_value
            out += [free, op, op / free]
        return out

    lo, hi = p["n_nodes"]
    rows, dropped = evaluate_grid(row, list(range(lo, hi + 1)), jobs)
    return _finish("fig3", header, rows, dropped, dict(defaults=p, snr_linear=snr), method, hi - lo + 1)


def fig4(points=200, method="exact", jobs=1) -> SweepResult:
    p = FIGURE_DEFAULTS["fig4"]
    cfg = NetworkConfig(p["n_nodes"], p["snr"], p["blocklength"], p["theta"])
    rho_i, rho_s = sinr_collision(cfg), others_sinr_after_boost(cfg)
    boosted = power_control_snr(cfg) / (1.0 + cfg.snr * (cfg.n_nodes - 1))
    curves = {
        "ec_free": cfg.snr,
        "ec_collision": rho_i,
        "ec_others_after": rho_s,
        "ec_compensating_after": boosted,
    }

    def row(eps):
        return [eps] + [ec(s, cfg.theta, cfg.blocklength, eps, method) for s in curves.values()]

    rows, dropped = evaluate_grid(row, _eps_grid(p["eps_range"], points), jobs)
    meta = dict(defaults=p, sinr={k: v for k, v in curves.items()}, rho_c=power_control_snr(cfg))
    return _finish("fig4", ["eps", *curves], rows, dropped, meta, method, points)


def _loss_vs_nodes(name, columns, method, jobs) -> SweepResult:
    p = FIGURE_DEFAULTS[name]
    header = ["n_nodes"] + [f"{c}_theta{_tag(th)}" for th in p["thetas"] for c in columns]

    def row(n):
        out = [n]
        for th in p["thetas"]:
            rep = loss_factors(NetworkConfig(n, p["snr"], p["blocklength"], th), method=method)
            out += [getattr(rep, c) for c in columns]
        return out

    lo, hi = p["n_nodes"]
    rows, dropped = evaluate_grid(row, list(range(lo, hi + 1)), jobs)
    return _finish(name, header, rows, dropped, dict(defaults=p), method, hi - lo + 1)


def fig5(points=None, method="exact", jobs=1) -> SweepResult:
    return _loss_vs_nodes("fig5", ["alpha_c", "gamma_c"], method, jobs)


def fig6(points=None, method="exact", jobs=1) -> SweepResult:
    return _loss_vs_nodes("fig6", ["alpha", "alpha_t"], method, jobs)


def fig7(points=200, method="exact", jobs=1) -> SweepResult:
    p = FIGURE_DEFAULTS["fig7"]
    cfg = NetworkConfig(p["n_nodes"], p["snr"], p["blocklength"], p["theta"])
    ec_before = max_ec(sinr_collision(cfg), cfg.theta, cfg.blocklength, method=method).ec_value
    ec_after = max_ec(cfg.snr, cfg.theta, cfg.blocklength, method=method).ec_value
    theta_i = graceful_theta(cfg, method=method)

    def row(d):
        return [
            d,
            delay_outage_probability(ec_before, cfg.theta, d),
            delay_outage_probability(ec_after, theta_i, d),
        ]

    grid = [float(v) for v in np.linspace(*p["d_max"], points)]
    rows, dropped = evaluate_grid(row, grid, jobs)
    meta = dict(
        defaults=p,
        theta_i=theta_i,
        ec_before=ec_before,
        ec_after=ec_after,
        d_max_before=max_delay_for_outage(ec_before, cfg.theta, p["p_out"]),
        d_max_after=max_delay_for_outage(ec_after, theta_i, p["p_out"]),
    )
    return _finish("fig7", ["d_max", "p_out_before", "p_out_after"], rows, dropped, meta, method, points)


def fig8(points=100, method="exact", jobs=1) -> SweepResult:
    # rho_s_op sampled evenly over [rho_s, rho_i]; the range does not depend on T
    p = FIGURE_DEFAULTS["fig8"]
    cfgs = [NetworkConfig(p["n_nodes"], p["snr"], T, p["theta"]) for T in p["blocklength"]]
    header = ["rho_s_op", "rho_c_op"]
    for T in p["blocklength"]:
        header += [f"alpha_c_op_T{T}", f"theta2_T{T}", f"d_max_T{T}"]

    def row(r):
        out = [r]
        for cfg in cfgs:
            plan = joint_plan(cfg, r, method=method)
            if len(out) == 1:
                out.append(plan.rho_c_op)
            out += [
                plan.alpha_c_op,
                plan.theta2,
                max_delay_for_outage(plan.ec_target, plan.theta2, p["p_out"]),
            ]
        return out

    grid = [float(v) for v in np.linspace(others_sinr_after_boost(cfgs[0]), sinr_collision(cfgs[0]), points)]
    rows, dropped = evaluate_grid(row, grid, jobs)
    return _finish("fig8", header, rows, dropped, dict(defaults=p, sampling="linear"), method, points)


def _fig9_setup():
    p = FIGURE_DEFAULTS["fig9"]
    cfg = NetworkConfig(p["n_nodes"], p["snr"], p["blocklength"], p["theta"])
    return p, cfg, Priorities.checked(*p["priorities"])


def _plan_meta(plan) -> dict:
    return {
        "rho_s_op": plan.rho_s_op,
        "rho_c_op": plan.rho_c_op,
        "alpha_c_op": plan.alpha_c_op,
        "theta2": plan.theta2,
        "eta": plan.eta,
        "compensated_sinr": plan.compensated_sinr,
        "ec_target": plan.ec_target,
    }


def fig9(points=200, method="exact", jobs=1) -> SweepResult:
    p, cfg, pr = _fig9_setup()

    def row(r):
        plan = joint_plan(cfg, r, pr, method=method)
        return [r, plan.rho_c_op, plan.alpha_c_op, plan.theta2, plan.eta]

    grid = [float(v) for v in np.linspace(others_sinr_after_boost(cfg), sinr_collision(cfg), points)]
    rows, dropped = evaluate_grid(row, grid, jobs)
    best = optimize_joint(cfg, pr, points=points, method=method)
    header = ["rho_s_op", "rho_c_op", "alpha_c_op", "theta2", "eta"]
    return _finish("fig9", header, rows, dropped, dict(defaults=p, optimum=_plan_meta(best)), method, points)


def fig10(points=200, method="exact", jobs=1) -> SweepResult:
    p, cfg, pr = _fig9_setup()
    best = optimize_joint(cfg, pr, method=method)
    theta, T = cfg.theta, cfg.blocklength
    curves = [
        ("ec_free", cfg.snr, theta),
        ("ec_collision", sinr_collision(cfg), theta),
        ("ec_others_after", best.rho_s_op, theta),
        ("ec_compensating_after", best.compensated_sinr, best.theta2),
    ]

    def row(eps):
        return [eps] + [ec(s, th, T, eps, method) for _, s, th in curves]

    rows, dropped = evaluate_grid(row, _eps_grid(FIGURE_DEFAULTS["fig10"]["eps_range"], points), jobs)
    header = ["eps"] + [c[0] for c in curves]
    meta = dict(defaults=FIGURE_DEFAULTS["fig10"], optimum=_plan_meta(best))
    return _finish("fig10", header, rows, dropped, meta, method, points)


GENERATORS: dict[str, Callable[..., SweepResult]] = {
    name: globals()[name] for name in FIGURES
}


def figure(name: str, points=None, method="exact", jobs=1) -> SweepResult:
    if name not in GENERATORS:
        raise DomainError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    kwargs = {} if points is None else {"points": points}
    return GENERATORS[name](method=method, jobs=jobs, **kwargs)
