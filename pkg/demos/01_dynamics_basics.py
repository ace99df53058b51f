#!/usr/bin/env python3
"""Tour of the plant model: thrust map, speed envelope, resurfacing.

Run: python demos/01_dynamics_basics.py [--plot]
"""

import argparse

from rovsim import ThrusterDuties, VehicleParams, VehicleState, duty_to_thrust, step

SUBSTEP = 0.005


def simulate(state, duties, params, seconds):
    history = [state]
    for _ in range(int(seconds / SUBSTEP)):
        state = step(state, duties, params, SUBSTEP)
        history.append(state)
    return history


def main():
    args = argparse.ArgumentParser(description=__doc__)
    args.add_argument("--plot", action="store_true", help="save PNGs next to this script")
    opts = args.parse_args()

    params = VehicleParams()
    print("Default vehicle:")
    print(f"  mass {params.mass} kg, weight {params.weight_force:.2f} N, "
          f"buoyancy {params.buoyant_force} N (net {params.buoyant_force - params.weight_force:+.2f} N up)")

    print("\nThrust map (deadband then linear to the 5 N rail):")
    for duty in (0.0, 0.04, 0.05, 0.25, 0.5, 1.0):
        print(f"  duty {duty:+.2f} -> {duty_to_thrust(duty, params):6.3f} N")

    print("\nFull symmetric surge from rest (Table-spec envelope is 0.2-0.4 m/s):")
    cruise = simulate(VehicleState(depth=1.0), ThrusterDuties(left=1.0, right=1.0), params, 60.0)
    for t in (1.0, 5.0, 20.0, 60.0):
        s = cruise[int(t / SUBSTEP)]
        print(f"  t={t:5.1f}s  u={s.u:.3f} m/s")

    print("\nUnpowered resurfacing from 2 m (positive net buoyancy):")
    rise = simulate(VehicleState(depth=2.0), ThrusterDuties(), params, 15.0)
    for t in (0.0, 2.0, 5.0, 8.0, 10.0):
        s = rise[int(t / SUBSTEP)]
        print(f"  t={t:5.1f}s  depth={s.depth:.3f} m  w={s.w:+.3f} m/s")
    surfaced = next(s.t for s in rise if s.depth < 0.05)
    print(f"  breaks 0.05 m at t={surfaced:.1f}s")

    if opts.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=False)
        ax1.plot([s.t for s in cruise], [s.u for s in cruise])
        ax1.axhspan(0.2, 0.4, alpha=0.2, color="green", label="operating band")
        ax1.set_ylabel("surge u [m/s]")
        ax1.legend()
        ax2.plot([s.t for s in rise], [s.depth for s in rise])
        ax2.set_ylabel("depth [m]")
        ax2.set_xlabel("t [s]")
        ax2.invert_yaxis()
        fig.tight_layout()
        fig.savefig("demos/01_dynamics_basics.png", dpi=120)
        print("\nwrote demos/01_dynamics_basics.png")


if __name__ == "__main__":
    main()
