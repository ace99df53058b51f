#!/usr/bin/env python3
"""Open-loop yaw experiment: differential burn, release, free decay.

The pool test this mirrors drove the side thrusters differentially and
recorded the yaw response in real time. Run with --plot for the figure.
"""

import argparse
import math

from rovsim import get_scenario, run_scenario
from rovsim.angles import angle_diff, wrap_angle


def unwrap(angles):
    out = [angles[0]]
    for a in angles[1:]:
        out.append(out[-1] + angle_diff(a, wrap_angle(out[-1])))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--plot", action="store_true")
    opts = parser.parse_args()

    log = run_scenario(get_scenario("openloop_yaw"))
    t = [row.t for row in log.rows]
    yaw = unwrap([row.yaw for row in log.rows])
    rate = [row.r for row in log.rows]

    print("Burn +0.4/-0.4 duty for 5 s, then release:")
    for mark in (0.0, 2.5, 5.0, 7.5, 10.0, 15.0):
        k = min(range(len(t)), key=lambda i: abs(t[i] - mark))
        print(f"  t={t[k]:5.2f}s  yaw={math.degrees(yaw[k]):8.1f} deg  r={rate[k]:+.3f} rad/s")

    peak = max(rate)
    release = next(i for i, ti in enumerate(t) if ti >= 5.0)
    quiet = next(ti for ti, r in zip(t[release:], rate[release:]) if abs(r) < 0.01)
    print(f"\npeak rate {peak:.3f} rad/s; decays below 0.01 rad/s {quiet - 5.0:.2f}s after release")

    if opts.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
        ax1.plot(t, [math.degrees(v) for v in yaw])
        ax1.axvspan(0, 5, alpha=0.15, color="orange", label="burn")
        ax1.set_ylabel("yaw [deg, unwrapped]")
        ax1.legend()
        ax2.plot(t, rate)
        ax2.axhline(0.01, ls="--", c="gray")
        ax2.set_ylabel("yaw rate [rad/s]")
        ax2.set_xlabel("t [s]")
        fig.tight_layout()
        fig.savefig("demos/02_openloop_yaw.png", dpi=120)
        print("wrote demos/02_openloop_yaw.png")


if __name__ == "__main__":
    main()
