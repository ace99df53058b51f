"""Angle helpers shared by the simulator, estimator, and controller."""

import math

TAU = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi].

    Values already inside the interval pass through bit-identically, which
    keeps small-angle trajectories exactly mirror-symmetric under negation.
    """
    if -math.pi < angle <= math.pi:
        return angle
    wrapped = angle % TAU  # [0, tau)
    if wrapped > math.pi:
        wrapped -= TAU
    return wrapped


def angle_diff(target: float, source: float) -> float:
    """Shortest signed arc from ``source`` to ``target``, in (-pi, pi]."""
    return wrap_angle(target - source)
