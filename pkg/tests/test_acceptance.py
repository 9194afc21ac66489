"""The eleven acceptance criteria, each at its stated tolerance.

A one-line verdict per criterion is printed in the terminal summary.
"""

import math

import numpy as np
import pytest

from fbec.channel import NetworkConfig, max_delay_for_outage, sinr_collision
from fbec.compensate import (
    Priorities,
    graceful_theta,
    loss_factors,
    optimize_joint,
    others_sinr_forms,
    power_control_snr,
    verify_power_restoration,
)
from fbec.effcap import ec, psi, psi_closed, psi_exact, psi_taylor
from fbec.optimize import URConstraint, constrained_optimal_eps, max_ec, optimal_eps


def within(value, target, tol):
    return abs(value - target) <= tol


def random_config(rng, n_max=20):
    n = int(rng.integers(1, n_max + 1))
    rho = 10 ** rng.uniform(-1, 1)
    theta = 10 ** rng.uniform(-3, -1)
    T = int(rng.integers(200, 1501))
    return n, rho, theta, T, rho / (1 + rho * (n - 1))


# 1 ------------------------------------------------------------------------


def test_c01_power_control_example(record):
    rho_c = power_control_snr(NetworkConfig(3, 0.5, 1000, 0.01))
    assert record(1, "rho_c", rho_c == 1.0, f"rho_c={rho_c!r}")


# 2 ------------------------------------------------------------------------


def test_c02_graceful_degradation_example(record):
    cfg = NetworkConfig(5, 1.0, 1000, 0.05)
    theta_i = graceful_theta(cfg)
    common = max_ec(sinr_collision(cfg), theta_i, cfg.blocklength).ec_value
    ok_theta = record(2, "theta_i", within(theta_i, 0.023, 0.002), f"{theta_i:.5f} vs 0.023+-0.002")
    ok_ec = record(2, "EC", within(common, 0.066, 0.003), f"{common:.5f} vs 0.066+-0.003")
    assert ok_theta and ok_ec


# 3 ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def joint_optimum():
    cfg = NetworkConfig(15, 2.0, 1000, 0.1)
    return optimize_joint(cfg, Priorities(1.0, 4.0))


def test_c03_joint_example(record, joint_optimum):
    p = joint_optimum
    checks = [
        ("rho_s_op", p.rho_s_op, 0.057, 0.005),
        ("alpha_c_op", p.alpha_c_op, 0.9397, 0.01),
        ("theta2", p.theta2, 0.053, 0.005),
        ("rho_c_op", p.rho_c_op, 8.08, 0.15),
    ]
    results = [
        record(3, name, within(value, target, tol), f"{value:.5g} vs {target}+-{tol}")
        for name, value, target, tol in checks
    ]
    assert all(results)


# 4 ------------------------------------------------------------------------


def test_c04_reliability_tradeoff(record):
    sinr = sinr_collision(NetworkConfig(5, 2.0, 1000, 0.01))
    free = optimal_eps(sinr, 0.01, 1000)
    bound = constrained_optimal_eps(sinr, 0.01, 1000, URConstraint(1e-3))
    sacrifice = 1.0 - bound.ec_value / free.ec_value
    oks = [
        record(4, "EC_op", within(bound.ec_value, 0.10, 0.01), f"{bound.ec_value:.5f}"),
        record(4, "EC_max", within(free.ec_value, 0.11, 0.01), f"{free.ec_value:.5f}"),
        record(4, "sacrifice", within(sacrifice, 0.09, 0.03), f"{sacrifice:.2%}"),
    ]
    assert all(oks)


# 5 ------------------------------------------------------------------------


def test_c05_delay_bound_extension(record):
    cfg = NetworkConfig(5, 1.0, 1000, 0.05)
    ec_before = max_ec(sinr_collision(cfg), cfg.theta, cfg.blocklength).ec_value
    ec_after = max_ec(cfg.snr, cfg.theta, cfg.blocklength).ec_value
    theta_i = graceful_theta(cfg)
    before = max_delay_for_outage(ec_before, cfg.theta, 1e-3)
    after = max_delay_for_outage(ec_after, theta_i, 1e-3)
    oks = [
        record(5, "D_max before", within(before, 3600, 360), f"{before:.0f} vs 3600+-10%"),
        record(5, "D_max after", within(after, 4600, 460), f"{after:.0f} vs 4600+-10%"),
    ]
    assert all(oks)


# 6 ------------------------------------------------------------------------


def fig2_grid():
    """500 points: eps log-spaced on [1e-6, 0.5], N cycling through 1, 5, 10."""
    eps = np.geomspace(1e-6, 0.5, 500)
    return [(2.0 / (1 + 2.0 * (n - 1)), float(e)) for n, e in zip([1, 5, 10] * 167, eps)]


def test_c06_closed_matches_taylor(record):
    worst = max(
        abs(psi_closed(s, 0.01, 1000, e) / psi_taylor(s, 0.01, 1000, e) - 1) for s, e in fig2_grid()
    )
    assert record(6, "closed vs taylor", worst < 1e-9, f"max rel err {worst:.2e} < 1e-9")


def test_c06_closed_matches_exact(record):
    worst = max(
        abs(psi_closed(s, 0.01, 1000, e) / psi_exact(s, 0.01, 1000, e) - 1) for s, e in fig2_grid()
    )
    assert record(6, "closed vs exact", worst < 1e-2, f"max rel err {worst:.3g} < 1e-2")


# 7 ------------------------------------------------------------------------


def test_c07_convexity_and_uniqueness(record):
    rng = np.random.default_rng(20240607)
    eps = np.geomspace(1e-8, 0.5, 200)
    step = math.log(eps[1] / eps[0])
    worst, misses = math.inf, 0
    for _ in range(50):
        _, _, theta, T, sinr = random_config(rng)
        values = np.array([psi_exact(sinr, theta, T, e) for e in eps])
        # second divided differences: the grid is non-uniform in eps
        slopes = np.diff(values) / np.diff(eps)
        second = np.diff(slopes) / (eps[2:] - eps[:-2])
        worst = min(worst, second.min())
        found = optimal_eps(sinr, theta, T).eps_star
        misses += abs(math.log(found / eps[np.argmin(values)])) > step
    oks = [
        record(7, "second differences", worst >= -1e-10, f"min {worst:.3g} >= -1e-10"),
        record(7, "argmin", misses == 0, f"{misses}/50 optima off the grid argmin by > 1 step"),
    ]
    assert all(oks)


# 8 ------------------------------------------------------------------------


def test_c08_kkt_gate_matches_brute_force(record):
    rng = np.random.default_rng(8)
    failures = []
    for k in range(100):
        _, _, theta, T, sinr = random_config(rng, n_max=15)
        target = 10 ** rng.uniform(-6, -1)
        grid = np.geomspace(1e-12, target, 3000)
        values = np.array([psi(sinr, theta, T, e) for e in grid])
        j = int(np.argmin(values))
        res = constrained_optimal_eps(sinr, theta, T, URConstraint(target))
        ec_grid = ec(sinr, theta, T, grid[j])
        close = abs(math.log(res.eps_star / grid[j])) <= math.log(grid[1] / grid[0])
        if res.ec_value < ec_grid - 1e-12 or not (close or abs(res.psi_value - values[j]) < 1e-12):
            failures.append((k, res.eps_star, grid[j]))
    assert record(8, "KKT vs grid", not failures, f"{len(failures)}/100 disagreements {failures[:3]}")


# 9 ------------------------------------------------------------------------


def sinr_sensitivity(sinr, theta, eps, method, h=1e-4):
    hi = ec(sinr * (1 + h), theta, 1000, eps, method)
    lo = ec(sinr * (1 - h), theta, 1000, eps, method)
    return (hi - lo) / (2 * h * sinr)


@pytest.mark.parametrize("method", ["exact", "closed"])
def test_c09_sinr_sensitivity_shrinks_with_theta(record, method):
    thetas = [0.001, 0.01, 0.1, 1.0]
    bad = []
    for rho in np.geomspace(0.1, 10, 20):
        for eps in (1e-3, 1e-2):
            s = [sinr_sensitivity(rho, th, eps, method) for th in thetas]
            if min(s) <= 0 or any(b > a * (1 + 1e-9) for a, b in zip(s, s[1:])):
                bad.append((rho, eps, s))
    assert record(9, f"{method} model", not bad, f"{len(bad)}/40 (rho, eps) cases violate")


# 10 -----------------------------------------------------------------------


def test_c10_definitional_identities(record):
    worst_gamma = worst_total = worst_form = 0.0
    restored = True
    for n in (2, 3, 5, 10, 20):
        for rho in (0.5, 1.0, 2.0):
            cfg = NetworkConfig(n, rho, 1000, 0.05)
            rep = loss_factors(cfg)
            worst_gamma = max(worst_gamma, abs(rep.gamma_c * rep.alpha - 1))
            worst_total = max(worst_total, abs(rep.alpha_t - rep.alpha * rep.alpha_c))
            direct, expanded = others_sinr_forms(cfg)
            worst_form = max(worst_form, abs(direct - expanded) / expanded)
            restored &= verify_power_restoration(cfg, tol=1e-12)
    oks = [
        record(10, "gamma_c*alpha", worst_gamma <= 1e-12, f"{worst_gamma:.1e}"),
        record(10, "alpha_t", worst_total <= 1e-12, f"{worst_total:.1e}"),
        record(10, "restoration", restored, "EC(boosted) == EC(free) to 1e-12"),
        record(10, "SINR forms", worst_form <= 1e-14, f"{worst_form:.1e}"),
    ]
    assert all(oks)


# 11 -----------------------------------------------------------------------


def test_c11_monotonicity(record):
    stars = [
        optimal_eps(sinr_collision(NetworkConfig(n, 2.0, 1000, 0.01)), 0.01, 1000).eps_star
        for n in range(1, 11)
    ]
    increasing = all(b > a for a, b in zip(stars, stars[1:]))
    lower = [
        loss_factors(NetworkConfig(n, 1.0, 1000, 0.001)).alpha_c
        < loss_factors(NetworkConfig(n, 1.0, 1000, 0.1)).alpha_c
        for n in range(2, 31)
    ]
    oks = [
        record(11, "eps* in N", increasing, "N = 1..10, rho=2, theta=0.01"),
        record(11, "alpha_c in theta", all(lower), f"{sum(lower)}/29 values of N"),
    ]
    assert all(oks)
