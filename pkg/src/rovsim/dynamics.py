"""Rigid-body simulator for the three actuated degrees of freedom.

The vehicle is modeled in surge (body-forward translation), heave (vertical
translation, positive down) and yaw (rotation about the vertical axis), plus
the planar world-frame kinematics (x, y) they induce. Roll, pitch and sway
are unactuated and assumed passively stable, so they are not modeled.

Conventions:
    depth   m, positive down, 0 at the surface (hard constraint)
    yaw     rad, wrapped to (-pi, pi], positive counter-clockwise from above
    u       m/s, body surge velocity
    w       m/s, heave velocity, positive down
    r       rad/s, yaw rate

Forces: a single hydrostatic term (weight minus buoyancy, positive down),
per-motor thrust from a deadband + linear PWM duty map, and quadratic drag
d*v*|v| on each axis. Integration is semi-implicit Euler: velocities first,
then positions from the new velocities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .angles import wrap_angle


class SimulationDivergedError(RuntimeError):
    """State left the finite range; indicates bad parameters or timestep."""

    def __init__(self, message: str, tick_index: int | None = None):
        super().__init__(message)
        self.tick_index = tick_index


# Largest stable substep for the default parameter set.
MAX_STEP_DT = 0.02


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the vehicle.

    Defaults reproduce the 1.6 kg, 20 m rated prototype: slightly positive
    net buoyancy (buoyant_force > mass*gravity) so the unpowered vehicle
    resurfaces, and drag calibrated so full symmetric thrust settles in the
    0.2-0.4 m/s operating band.

    Units: mass kg; forces N; drag_surge/drag_heave N.s^2/m^2;
    drag_yaw N.m.s^2/rad^2; yaw_inertia kg.m^2; thruster_arm m;
    gravity m/s^2; water_density kg/m^3; max_depth m.
    """

    mass: float = 1.6
    buoyant_force: float = 16.7
    max_thrust_per_motor: float = 5.0
    duty_deadband: float = 0.05
    drag_surge: float = 110.0
    drag_heave: float = 15.0
    drag_yaw: float = 0.7
    yaw_inertia: float = 0.02
    thruster_arm: float = 0.13
    gravity: float = 9.81
    water_density: float = 1000.0
    max_depth: float = 20.0

    @property
    def weight_force(self) -> float:
        """Weight in N, always exactly mass * gravity."""
        return self.mass * self.gravity

    def __post_init__(self) -> None:
        positive = {
            "mass": self.mass,
            "yaw_inertia": self.yaw_inertia,
            "thruster_arm": self.thruster_arm,
            "gravity": self.gravity,
            "water_density": self.water_density,
            "max_depth": self.max_depth,
            "max_thrust_per_motor": self.max_thrust_per_motor,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")
        nonneg = {
            "buoyant_force": self.buoyant_force,
            "drag_surge": self.drag_surge,
            "drag_heave": self.drag_heave,
            "drag_yaw": self.drag_yaw,
        }
        for name, value in nonneg.items():
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
        if not (0.0 <= self.duty_deadband < 1.0):
            raise ValueError(f"duty_deadband must be in [0, 1), got {self.duty_deadband}")

    @classmethod
    def from_dict(cls, data: dict) -> "VehicleParams":
        """Build params from a scenario-JSON mapping; omitted keys default.

        weight_force is derived and therefore rejected as an input key.
        """
        if "weight_force" in data:
            raise ValueError("weight_force is derived from mass*gravity; do not set it")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown VehicleParams keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class VehicleState:
    """Ground-truth pose and body velocities at simulated time t."""

    t: float = 0.0
    x: float = 0.0
    y: float = 0.0
    depth: float = 0.0
    yaw: float = 0.0
    u: float = 0.0
    w: float = 0.0
    r: float = 0.0

    def __post_init__(self) -> None:
        for name in ("t", "x", "y", "depth", "yaw", "u", "w", "r"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"VehicleState.{name} must be finite")
        if self.depth < 0.0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))


def _clamped_duty(value: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"duty must be finite, got {value}")
    return min(1.0, max(-1.0, value))


@dataclass(frozen=True)
class ThrusterDuties:
    """Signed PWM duty per motor, each clamped to [-1, 1]."""

    left: float = 0.0
    right: float = 0.0
    vertical: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", _clamped_duty(self.left))
        object.__setattr__(self, "right", _clamped_duty(self.right))
        object.__setattr__(self, "vertical", _clamped_duty(self.vertical))


def duty_to_thrust(duty: float, params: VehicleParams) -> float:
    """Map a signed PWM duty to motor thrust in N.

    Odd in duty: zero inside the deadband, then linear up to
    max_thrust_per_motor at |duty| = 1.
    """
    if not math.isfinite(duty):
        raise ValueError(f"duty must be finite, got {duty}")
    mag = min(abs(duty), 1.0)
    if mag < params.duty_deadband:
        return 0.0
    thrust = params.max_thrust_per_motor * (mag - params.duty_deadband) / (1.0 - params.duty_deadband)
    return math.copysign(thrust, duty)


def net_forces(
    state: VehicleState, duties: ThrusterDuties, params: VehicleParams
) -> tuple[float, float, float]:
    """Net (F_surge N, F_heave N positive down, Tau_yaw N.m) on the body."""
    t_left = duty_to_thrust(duties.left, params)
    t_right = duty_to_thrust(duties.right, params)
    t_vert = duty_to_thrust(duties.vertical, params)
    f_surge = t_left + t_right - params.drag_surge * state.u * abs(state.u)
    tau_yaw = (t_left - t_right) * params.thruster_arm - params.drag_yaw * state.r * abs(state.r)
    f_heave = (
        params.weight_force
        - params.buoyant_force
        + t_vert
        - params.drag_heave * state.w * abs(state.w)
    )
    return f_surge, f_heave, tau_yaw


def step(
    state: VehicleState, duties: ThrusterDuties, params: VehicleParams, dt: float
) -> VehicleState:
    """Advance the state by one fixed substep of dt seconds.

    Semi-implicit Euler; the surface (depth 0) and the rated floor
    (max_depth) are hard clamps that also zero the offending heave rate.
    """
    if not (0.0 < dt <= MAX_STEP_DT):
        raise ValueError(f"dt must be in (0, {MAX_STEP_DT}], got {dt}")
    f_surge, f_heave, tau_yaw = net_forces(state, duties, params)

    u = state.u + dt * f_surge / params.mass
    w = state.w + dt * f_heave / params.mass
    r = state.r + dt * tau_yaw / params.yaw_inertia

    x = state.x + dt * u * math.cos(state.yaw)
    y = state.y + dt * u * math.sin(state.yaw)
    depth = state.depth + dt * w
    if depth < 0.0:
        depth = 0.0
        w = max(w, 0.0)
    elif depth > params.max_depth:
        depth = params.max_depth
        w = min(w, 0.0)
    yaw = wrap_angle(state.yaw + dt * r)
    t = state.t + dt

    for name, value in (("u", u), ("w", w), ("r", r), ("x", x), ("y", y), ("yaw", yaw)):
        if not math.isfinite(value):
            raise SimulationDivergedError(
                f"non-finite {name} after step at t={state.t:.4f}; check params/dt"
            )
    return VehicleState(t=t, x=x, y=y, depth=depth, yaw=yaw, u=u, w=w, r=r)
