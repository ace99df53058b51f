"""Closed-loop control: PI on yaw and depth plus the three-thruster mixer.

Yaw error is always computed on the circle (shortest arc). The two side
thrusters mix open-loop surge with the differential yaw command; the top
thruster takes the depth command directly. Manual mode passes operator
duties straight through for open-loop experiments.

The PI integral state is kept in output (duty) space: it accumulates
ki*error*dt and is clamped to +/-integral_limit, so integral authority is
bounded in the same units the saturation limits use. Conditional
anti-windup additionally freezes the integral whenever the output is
saturated and the error would drive it further into saturation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .angles import angle_diff, wrap_angle
from .dynamics import ThrusterDuties


class Mode(enum.IntEnum):
    MANUAL = 0
    CLOSED_LOOP = 1


@dataclass(frozen=True)
class PIGains:
    """PI gains with duty-space saturation and integral authority limits."""

    kp: float
    ki: float
    out_min: float = -1.0
    out_max: float = 1.0
    integral_limit: float = 0.5

    def __post_init__(self) -> None:
        for name in ("kp", "ki", "out_min", "out_max", "integral_limit"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.kp < 0 or self.ki < 0:
            raise ValueError(f"kp and ki must be >= 0, got kp={self.kp} ki={self.ki}")
        if not self.out_min < self.out_max:
            raise ValueError(f"out_min must be < out_max, got [{self.out_min}, {self.out_max}]")
        if self.integral_limit < 0:
            raise ValueError(f"integral_limit must be >= 0, got {self.integral_limit}")


# Defaults tuned against the closed-loop regression scenarios.
YAW_GAINS = PIGains(kp=0.8, ki=0.1)
DEPTH_GAINS = PIGains(kp=0.6, ki=0.15)


@dataclass(frozen=True)
class PIState:
    """Controller memory: duty-space integral term and accumulated time."""

    integral: float = 0.0
    last_t: float = 0.0


@dataclass(frozen=True)
class ControlSetpoints:
    """Commanded references plus the operator's open-loop inputs."""

    mode: Mode = Mode.MANUAL
    yaw_ref: float = 0.0
    depth_ref: float = 0.0
    surge_duty: float = 0.0
    manual_duties: ThrusterDuties = field(default_factory=ThrusterDuties)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.yaw_ref) and math.isfinite(self.depth_ref) and math.isfinite(self.surge_duty)):
            raise ValueError("setpoints must be finite")
        if self.depth_ref < 0:
            raise ValueError(f"depth_ref must be >= 0, got {self.depth_ref}")
        object.__setattr__(self, "yaw_ref", wrap_angle(self.yaw_ref))
        object.__setattr__(self, "surge_duty", min(1.0, max(-1.0, self.surge_duty)))


def pi_step(gains: PIGains, st: PIState, error: float, dt: float) -> tuple[float, PIState]:
    """Advance the PI law one step; returns (output, new state).

    While unclamped the output follows u(t) = kp*e + ki*integral(e dt)
    exactly. The integral never exceeds +/-integral_limit, and it is not
    advanced on steps where the raw output is saturated and the error
    points further into that saturation.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be > 0, got {dt}")
    if not math.isfinite(error):
        raise ValueError("error must be finite")
    candidate = st.integral + gains.ki * error * dt
    candidate = min(gains.integral_limit, max(-gains.integral_limit, candidate))
    raw = gains.kp * error + candidate
    output = min(gains.out_max, max(gains.out_min, raw))
    deeper = (raw > gains.out_max and error > 0) or (raw < gains.out_min and error < 0)
    integral = st.integral if deeper else candidate
    return output, PIState(integral=integral, last_t=st.last_t + dt)


def control_step(
    setpoints: ControlSetpoints,
    yaw_est: float,
    depth_est: float,
    yaw_gains: PIGains,
    yaw_state: PIState,
    depth_gains: PIGains,
    depth_state: PIState,
    dt: float,
) -> tuple[ThrusterDuties, PIState, PIState]:
    """One control tick: duties from estimates, or manual passthrough.

    Sign convention: a positive yaw command drives left forward / right
    reverse, which turns the vehicle in the positive yaw direction.
    """
    if setpoints.mode == Mode.MANUAL:
        return setpoints.manual_duties, yaw_state, depth_state
    if not (math.isfinite(yaw_est) and math.isfinite(depth_est)):
        raise ValueError("estimates must be finite")
    yaw_error = angle_diff(setpoints.yaw_ref, yaw_est)
    yaw_cmd, yaw_state = pi_step(yaw_gains, yaw_state, yaw_error, dt)
    depth_error = setpoints.depth_ref - depth_est
    vertical, depth_state = pi_step(depth_gains, depth_state, depth_error, dt)
    left = min(1.0, max(-1.0, setpoints.surge_duty + yaw_cmd))
    right = min(1.0, max(-1.0, setpoints.surge_duty - yaw_cmd))
    return ThrusterDuties(left=left, right=right, vertical=vertical), yaw_state, depth_state
