#!/usr/bin/env python3
"""Closed-loop tuning regression: 30 deg yaw step and 1 m depth step.

Shows the PI controllers tracking their references through the full
sensor -> filter -> control -> plant loop, and the scored metrics.
"""

import argparse
import math

from rovsim import compute_step_metrics, get_scenario, run_scenario


def describe(log, channel, band, budget):
    m = compute_step_metrics(log, channel, 1.0, band=band)
    verdict = "OK" if m.settling_time <= budget else "TOO SLOW"
    print(f"  settling {m.settling_time:6.2f}s (budget {budget}s) [{verdict}]")
    print(f"  overshoot {m.overshoot_pct:5.1f}%   steady-state error {m.sse:+.4f}")
    return m


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--plot", action="store_true")
    opts = parser.parse_args()

    print("Yaw: 0 -> 30 deg at t=1 s (band +/-2 deg)")
    yaw_log = run_scenario(get_scenario("yaw_step_30deg"))
    describe(yaw_log, "yaw", math.radians(2.0), 15.0)

    print("\nDepth: 0 -> 1 m at t=1 s (band +/-0.05 m)")
    depth_log = run_scenario(get_scenario("depth_step_1m"))
    describe(depth_log, "depth", 0.05, 20.0)

    if opts.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6))
        t = [row.t for row in yaw_log.rows]
        ax1.plot(t, [math.degrees(row.yaw) for row in yaw_log.rows], label="yaw")
        ax1.plot(t, [math.degrees(row.yaw_ref) for row in yaw_log.rows], "--", label="reference")
        ax1.set_ylabel("yaw [deg]")
        ax1.legend()
        t = [row.t for row in depth_log.rows]
        ax2.plot(t, [row.depth for row in depth_log.rows], label="depth")
        ax2.plot(t, [row.depth_ref for row in depth_log.rows], "--", label="reference")
        ax2.set_ylabel("depth [m]")
        ax2.set_xlabel("t [s]")
        ax2.invert_yaxis()
        ax2.legend()
        fig.tight_layout()
        fig.savefig("demos/03_step_responses.png", dpi=120)
        print("\nwrote demos/03_step_responses.png")


if __name__ == "__main__":
    main()
