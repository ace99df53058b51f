#!/usr/bin/env python3
"""Flying the yaw step over a bad tether: latency, drops, corruption.

The impaired scenario repeats its setpoint command the way a pilot
console would; the maneuver still completes, and the link statistics
show what the tether ate.
"""

import math

from rovsim import compute_step_metrics, get_scenario, run_scenario


def main():
    scenario = get_scenario("link_impaired_yaw_step")
    cfg = scenario.link
    print(f"link: {cfg.latency_ms:.0f} ms latency, {cfg.drop_prob:.0%} drop, "
          f"{cfg.corrupt_prob:.2%} per-byte corruption")

    log = run_scenario(scenario)
    up, down = log.summary["uplink"], log.summary["downlink"]
    print(f"uplink:   {up['sent']} commands sent, {up['dropped']} dropped, {up['corrupted']} corrupted")
    print(f"downlink: {down['sent']} frames sent, {down['dropped']} dropped, {down['corrupted']} corrupted")

    m = compute_step_metrics(log, "yaw", 1.0, band=math.radians(2.0))
    print(f"\nmaneuver still lands: settled in {m.settling_time:.2f}s, overshoot {m.overshoot_pct:.1f}%")
    print(f"final yaw {math.degrees(log.rows[-1].yaw):.1f} deg vs reference "
          f"{math.degrees(log.rows[-1].yaw_ref):.1f} deg")


if __name__ == "__main__":
    main()
