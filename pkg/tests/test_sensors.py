"""Sensor emulation tests: conversions, noise-free projection, determinism."""

import math

import numpy as np
import pytest

from rovsim.dynamics import VehicleState
from rovsim.sensors import (
    P_ATM,
    ConstantField,
    LinearDepthField,
    NoiseConfig,
    SensorSuite,
    depth_from_pressure,
    ntu_to_voltage,
    turbidity_field_from_dict,
    voltage_to_ntu,
)

ZERO_NOISE = NoiseConfig().zeroed()


# -- hydrostatic conversion ---------------------------------------------------


def test_depth_from_pressure_hand_values():
    # hand-derived: P_atm + 1000 * 9.81 * d for d = 0, 10, 20
    assert depth_from_pressure(101325.0, 1000.0, 9.81) == 0.0
    assert depth_from_pressure(199425.0, 1000.0, 9.81) == pytest.approx(10.0, rel=1e-9)
    assert depth_from_pressure(297525.0, 1000.0, 9.81) == pytest.approx(20.0, rel=1e-9)


def test_depth_pressure_round_trip():
    for depth in np.linspace(0.0, 20.0, 201):
        pressure = P_ATM + 1000.0 * 9.81 * depth
        back = depth_from_pressure(pressure, 1000.0, 9.81)
        assert back == pytest.approx(float(depth), rel=1e-9, abs=1e-12)


def test_depth_from_pressure_validation():
    with pytest.raises(ValueError):
        depth_from_pressure(math.nan, 1000.0, 9.81)
    with pytest.raises(ValueError):
        depth_from_pressure(101325.0, 0.0, 9.81)
    with pytest.raises(ValueError):
        depth_from_pressure(101325.0, 1000.0, -9.81)


def test_negative_depth_allowed_under_noise():
    assert depth_from_pressure(101000.0, 1000.0, 9.81) < 0.0


# -- turbidity curve ----------------------------------------------------------


def test_turbidity_curve_hand_values():
    assert ntu_to_voltage(0.0) == pytest.approx(4.2, abs=1e-12)
    assert ntu_to_voltage(1000.0) == pytest.approx(3.4, abs=1e-12)  # 4.2 - 0.8
    assert ntu_to_voltage(10000.0) == 0.0  # clamped


def test_turbidity_inverse_pair():
    for ntu in np.linspace(0.0, 5250.0, 301):
        assert voltage_to_ntu(ntu_to_voltage(float(ntu))) == pytest.approx(
            float(ntu), rel=1e-9, abs=1e-9
        )


def test_turbidity_validation():
    with pytest.raises(ValueError):
        ntu_to_voltage(-1.0)
    with pytest.raises(ValueError):
        voltage_to_ntu(5.1)
    with pytest.raises(ValueError):
        voltage_to_ntu(-0.1)


def test_turbidity_fields():
    assert ConstantField(7.0).at(3.0, -2.0, 10.0) == 7.0
    field = LinearDepthField(surface_ntu=2.0, ntu_per_meter=40.0)
    assert field.at(0.0, 0.0, 0.0) == 2.0
    assert field.at(0.0, 0.0, 1.5) == 62.0
    assert turbidity_field_from_dict({"type": "constant", "ntu": 3.0}).at(0, 0, 0) == 3.0
    assert turbidity_field_from_dict({"type": "linear_depth"}).at(0, 0, 1.0) == 42.0
    with pytest.raises(ValueError):
        turbidity_field_from_dict({"type": "vortex"})


# -- sampling -----------------------------------------------------------------


def suite(noise=ZERO_NOISE, field=None):
    return SensorSuite(noise, field if field is not None else ConstantField(0.0))


def test_noise_free_sample_is_exact_projection():
    frames = suite().sample(VehicleState())
    assert frames.gyro_z == 0.0
    assert frames.pressure == 101325.0
    assert frames.mag_yaw == 0.0
    assert frames.turbidity_voltage == 4.2


def test_noise_free_pressure_at_ten_meters():
    frame = suite().sample(VehicleState(depth=10.0))
    assert frame.pressure == pytest.approx(199425.0, abs=1e-6)


def test_noise_free_heading_and_rate_projection():
    state = VehicleState(t=1.0, yaw=0.7, r=-0.3, depth=2.0)
    frame = suite().sample(state)
    assert frame.gyro_z == -0.3
    assert frame.mag_yaw == 0.7


def test_same_seed_gives_identical_frame_sequences():
    states = [VehicleState(t=0.02 * k, depth=0.1 * k, yaw=0.01 * k, r=0.05) for k in range(50)]
    noise = NoiseConfig(seed=42)
    s1, s2 = suite(noise), suite(noise)
    frames1 = [s1.sample(s) for s in states]
    frames2 = [s2.sample(s) for s in states]
    assert frames1 == frames2


def test_zero_walk_keeps_bias_exactly_zero():
    noisy_but_no_walk = NoiseConfig(gyro_sigma=0.0, gyro_bias_walk=0.0, mag_sigma=0.0,
                                    pressure_sigma=0.0, turbidity_sigma=0.0, seed=9)
    s = suite(noisy_but_no_walk)
    for k in range(100):
        frame = s.sample(VehicleState(t=0.02 * k, r=0.25))
        assert frame.gyro_z == 0.25
    assert s.gyro_bias == 0.0


def test_sample_times_must_strictly_increase():
    s = suite()
    s.sample(VehicleState(t=0.0))
    with pytest.raises(ValueError):
        s.sample(VehicleState(t=0.0))


def test_turbidity_voltage_clamped_to_adc_range():
    wild = NoiseConfig(turbidity_sigma=50.0, seed=3)
    s = suite(wild)
    for k in range(200):
        frame = s.sample(VehicleState(t=0.02 * k))
        assert 0.0 <= frame.turbidity_voltage <= 5.0


def test_noise_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(gyro_sigma=-0.001)
    with pytest.raises(ValueError):
        NoiseConfig.from_dict({"gyro": 1.0})
    cfg = NoiseConfig.from_dict({"mag_sigma": 0.05, "seed": 7})
    assert cfg.mag_sigma == 0.05 and cfg.seed == 7
