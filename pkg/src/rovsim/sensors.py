"""Sensor suite emulation: IMU heading/rate, pressure depth, turbidity.

Emulates the onboard kit from ground-truth state with seeded gaussian
noise. The 9-axis IMU is abstracted to the two channels the control loop
consumes: the z gyro rate (with an optional random-walk bias) and an
absolute magnetometer-derived heading. The accelerometer channel is
synthesized for completeness (gravity reaction plus centripetal term) but
carries no configurable noise and feeds nothing downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import wrap_angle
from .dynamics import VehicleState

P_ATM = 101325.0  # Pa, fixed sea-level reference

# Affine turbidity probe model: clear water reads the 4.2 V intercept and
# the signal falls 0.8 mV per NTU until it bottoms out at 0 V.
_TURBIDITY_V0 = 4.2
_TURBIDITY_SLOPE = 0.0008  # V per NTU
TURBIDITY_VOLTAGE_MAX = 5.0


@dataclass(frozen=True)
class NoiseConfig:
    """Per-channel gaussian sigmas plus the stream seed.

    gyro_bias_walk is the random-walk intensity in rad/s per sqrt(s); zero
    keeps the bias exactly zero. The prototype's datasheets publish no
    noise figures, so the defaults are plausible hobby-grade values.
    """

    gyro_sigma: float = 0.002
    gyro_bias_walk: float = 0.0005
    mag_sigma: float = 0.01
    pressure_sigma: float = 30.0
    turbidity_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("gyro_sigma", "gyro_bias_walk", "mag_sigma", "pressure_sigma", "turbidity_sigma"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown NoiseConfig keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "seed" in kwargs:
            kwargs["seed"] = int(kwargs["seed"])
        return cls(**kwargs)

    def zeroed(self) -> "NoiseConfig":
        """Copy with every sigma (and the bias walk) set to zero."""
        return NoiseConfig(0.0, 0.0, 0.0, 0.0, 0.0, self.seed)


@dataclass(frozen=True)
class SensorFrame:
    """One timestamped emulated reading set."""

    t: float
    gyro_z: float
    accel_xyz: tuple[float, float, float]
    mag_yaw: float
    pressure: float
    turbidity_voltage: float


class ConstantField:
    """Uniform turbidity everywhere."""

    def __init__(self, ntu: float = 5.0):
        if not (math.isfinite(ntu) and ntu >= 0):
            raise ValueError(f"ntu must be finite and >= 0, got {ntu}")
        self.ntu = float(ntu)

    def at(self, x: float, y: float, depth: float) -> float:
        return self.ntu


class LinearDepthField:
    """Turbidity increasing linearly with depth, floored at zero."""

    def __init__(self, surface_ntu: float = 2.0, ntu_per_meter: float = 40.0):
        self.surface_ntu = float(surface_ntu)
        self.ntu_per_meter = float(ntu_per_meter)

    def at(self, x: float, y: float, depth: float) -> float:
        return max(0.0, self.surface_ntu + self.ntu_per_meter * depth)


def turbidity_field_from_dict(data: dict):
    """Build a turbidity field from its scenario-JSON spec."""
    kind = data.get("type", "constant")
    if kind == "constant":
        return ConstantField(ntu=float(data.get("ntu", 5.0)))
    if kind == "linear_depth":
        return LinearDepthField(
            surface_ntu=float(data.get("surface_ntu", 2.0)),
            ntu_per_meter=float(data.get("ntu_per_meter", 40.0)),
        )
    raise ValueError(f"unknown turbidity field type: {kind!r}")


def ntu_to_voltage(ntu: float) -> float:
    """Probe output voltage for a turbidity in NTU, clamped to [0, 4.2]."""
    if not (math.isfinite(ntu) and ntu >= 0):
        raise ValueError(f"ntu must be finite and >= 0, got {ntu}")
    return min(_TURBIDITY_V0, max(0.0, _TURBIDITY_V0 - _TURBIDITY_SLOPE * ntu))


def voltage_to_ntu(voltage: float) -> float:
    """Inverse of ntu_to_voltage on the unclamped range.

    May return a negative NTU for voltages above the clear-water intercept
    (possible under noise); callers clamp for display, never for control.
    """
    if not math.isfinite(voltage) or not (0.0 <= voltage <= TURBIDITY_VOLTAGE_MAX):
        raise ValueError(f"voltage must be in [0, {TURBIDITY_VOLTAGE_MAX}], got {voltage}")
    return (_TURBIDITY_V0 - voltage) / _TURBIDITY_SLOPE


def depth_from_pressure(pressure: float, water_density: float, gravity: float) -> float:
    """Hydrostatic depth in m for an absolute pressure in Pa.

    Slightly negative results are possible under noise; callers clamp for
    display only, not for control.
    """
    if not math.isfinite(pressure):
        raise ValueError(f"pressure must be finite, got {pressure}")
    if not (math.isfinite(water_density) and water_density > 0):
        raise ValueError(f"water_density must be > 0, got {water_density}")
    if not (math.isfinite(gravity) and gravity > 0):
        raise ValueError(f"gravity must be > 0, got {gravity}")
    return (pressure - P_ATM) / (water_density * gravity)


class SensorSuite:
    """Owns the deterministic noise stream and the gyro bias state.

    One suite per simulation run; the caller owns it the way embedded code
    owns its RNG. Draw order per sample is fixed (bias walk, gyro, mag,
    pressure, turbidity) so equal seeds give bit-equal frame sequences.
    """

    def __init__(
        self,
        noise: NoiseConfig,
        field,
        water_density: float = 1000.0,
        gravity: float = 9.81,
        rng: np.random.Generator | None = None,
    ):
        self.noise = noise
        self.field = field
        self.water_density = float(water_density)
        self.gravity = float(gravity)
        self.rng = rng if rng is not None else np.random.default_rng(noise.seed)
        self.gyro_bias = 0.0
        self._last_t: float | None = None

    def sample(self, state: VehicleState) -> SensorFrame:
        """Emulate one reading set from ground truth."""
        if self._last_t is not None:
            if state.t <= self._last_t:
                raise ValueError(f"sample times must strictly increase ({state.t} after {self._last_t})")
            dt = state.t - self._last_t
            self.gyro_bias += float(self.rng.normal(0.0, self.noise.gyro_bias_walk * math.sqrt(dt)))
        self._last_t = state.t

        gyro_z = state.r + self.gyro_bias + float(self.rng.normal(0.0, self.noise.gyro_sigma))
        mag_yaw = wrap_angle(state.yaw + float(self.rng.normal(0.0, self.noise.mag_sigma)))
        pressure = (
            P_ATM
            + self.water_density * self.gravity * state.depth
            + float(self.rng.normal(0.0, self.noise.pressure_sigma))
        )
        pressure = max(0.0, pressure)
        voltage = ntu_to_voltage(self.field.at(state.x, state.y, state.depth))
        voltage = voltage + float(self.rng.normal(0.0, self.noise.turbidity_sigma))
        voltage = min(TURBIDITY_VOLTAGE_MAX, max(0.0, voltage))
        # Specific-force synthesis for the flat (roll/pitch free) vehicle.
        accel = (0.0, state.u * state.r, -self.gravity)
        return SensorFrame(
            t=state.t,
            gyro_z=gyro_z,
            accel_xyz=accel,
            mag_yaw=mag_yaw,
            pressure=pressure,
            turbidity_voltage=voltage,
        )
