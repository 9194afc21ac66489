"""Print the numerical worked examples next to the values quoted for them.

    python3 scripts/worked_examples.py [--method closed]
"""

import argparse

from fbec.channel import NetworkConfig, max_delay_for_outage, sinr_collision
from fbec.compensate import Priorities, graceful_theta, optimize_joint, power_control_snr
from fbec.optimize import URConstraint, ec_sacrifice_ratio, max_ec, optimal_eps


def row(label, value, quoted):
    print(f"  {label:<28s} {value:>12.6g}   (quoted {quoted})")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--method", default="exact", choices=("exact", "closed"))
    method = parser.parse_args().method

    print("reliability trade-off: N=5, rho=2, theta=0.01, T=1000")
    s = sinr_collision(NetworkConfig(5, 2.0, 1000, 0.01))
    free = optimal_eps(s, 0.01, 1000, method)
    bound = max_ec(s, 0.01, 1000, URConstraint(1e-3), method)
    row("eps*", free.eps_star, "2.5e-2")
    row("EC_max", free.ec_value, "0.11")
    row("EC at eps_t = 1e-3", bound.ec_value, "0.10")
    row("EC sacrificed", 1 - ec_sacrifice_ratio(s, 0.01, 1000, URConstraint(1e-3), method), "0.09")

    print("power control: N=3, rho=0.5")
    row("rho_c", power_control_snr(NetworkConfig(3, 0.5)), "1")

    print("graceful degradation: N=5, rho=1, theta=0.05, T=1000")
    cfg = NetworkConfig(5, 1.0, 1000, 0.05)
    theta_i = graceful_theta(cfg, method=method)
    ec_before = max_ec(sinr_collision(cfg), cfg.theta, 1000, method=method).ec_value
    ec_after = max_ec(cfg.snr, cfg.theta, 1000, method=method).ec_value
    row("theta_i", theta_i, "0.023")
    row("common EC", ec_after, "0.066")
    row("D_max before (P_out=1e-3)", max_delay_for_outage(ec_before, cfg.theta, 1e-3), "3600")
    row("D_max after (P_out=1e-3)", max_delay_for_outage(ec_after, theta_i, 1e-3), "4600")

    print("joint compensation: N=15, rho=2, theta=0.1, T=1000, eta=(1, 4)")
    plan = optimize_joint(NetworkConfig(15, 2.0, 1000, 0.1), Priorities(1.0, 4.0), method=method)
    row("rho_s_op", plan.rho_s_op, "0.057")
    row("alpha_c_op", plan.alpha_c_op, "0.9397")
    row("theta2", plan.theta2, "0.053")
    row("rho_c_op", plan.rho_c_op, "8.08")


if __name__ == "__main__":
    main()
