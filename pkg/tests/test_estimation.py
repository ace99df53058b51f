"""Complementary filter tests: boundaries, convexity, bias, the seam."""

import math

import numpy as np
import pytest

from rovsim.angles import angle_diff, wrap_angle
from rovsim.estimation import DepthAverager, FilterState, filter_update

DT = 0.02


def test_alpha_one_is_pure_integration():
    fs = FilterState(yaw_est=0.4, alpha=1.0)
    out = filter_update(fs, gyro_z=0.5, mag_yaw=-2.0, dt=DT)
    assert out.yaw_est == wrap_angle(0.4 + 0.5 * DT)


def test_alpha_zero_is_pure_measurement():
    fs = FilterState(yaw_est=0.4, alpha=0.0)
    out = filter_update(fs, gyro_z=0.5, mag_yaw=-2.0, dt=DT)
    assert out.yaw_est == -2.0


def test_hand_worked_update():
    # pred = 0.1745 * 0.01; innovation toward 0.0873 weighted 0.02
    fs = FilterState(yaw_est=0.0, alpha=0.98)
    out = filter_update(fs, gyro_z=0.1745, mag_yaw=0.0873, dt=0.01)
    pred = 0.1745 * 0.01
    expected = pred + 0.02 * (0.0873 - pred)
    assert out.yaw_est == pytest.approx(expected, abs=1e-15)
    assert out.yaw_est == pytest.approx(0.003456, abs=2e-6)


def test_update_is_convex_along_shortest_arc():
    rng = np.random.default_rng(5)
    for _ in range(2000):
        fs = FilterState(yaw_est=float(rng.uniform(-math.pi, math.pi)), alpha=float(rng.uniform(0, 1)))
        gyro = float(rng.uniform(-3, 3))
        mag = float(rng.uniform(-math.pi, math.pi))
        out = filter_update(fs, gyro, mag, DT)
        pred = wrap_angle(fs.yaw_est + gyro * DT)
        full = angle_diff(mag, pred)
        taken = angle_diff(out.yaw_est, pred)
        if full == 0.0:
            assert abs(taken) < 1e-12
        else:
            fraction = taken / full
            assert -1e-9 <= fraction <= 1.0 + 1e-9


def test_biased_gyro_steady_state_matches_closed_form():
    alpha, bias, true_yaw = 0.98, 0.02, 0.3
    fs = FilterState(yaw_est=true_yaw, alpha=alpha)
    for _ in range(5000):
        fs = filter_update(fs, gyro_z=bias, mag_yaw=true_yaw, dt=DT)
    expected_error = alpha * bias * DT / (1.0 - alpha)
    assert angle_diff(fs.yaw_est, true_yaw) == pytest.approx(expected_error, abs=1e-6)


def test_seam_crossing_goes_the_short_way():
    fs = FilterState(yaw_est=3.1, alpha=0.98)
    out = filter_update(fs, gyro_z=0.0, mag_yaw=-3.1, dt=DT)
    # short way from +3.1 toward -3.1 is upward through pi
    assert out.yaw_est > 3.1 or out.yaw_est < -3.1
    assert abs(angle_diff(-3.1, out.yaw_est)) < abs(angle_diff(-3.1, 3.1)) + 1e-12
    assert abs(angle_diff(out.yaw_est, fs.yaw_est)) < math.pi / 2


def test_tracks_smooth_step_maneuver_within_tolerance():
    # commanded 30 deg first-order approach; exact gyro + mag, default alpha
    target, rate_const = math.radians(30.0), 2.0
    fs = FilterState(yaw_est=0.0)
    t = 0.0
    for _ in range(int(4.0 / DT)):
        true_yaw = target * (1.0 - math.exp(-rate_const * t))
        true_rate = target * rate_const * math.exp(-rate_const * t)
        fs = filter_update(fs, gyro_z=true_rate, mag_yaw=true_yaw, dt=DT)
        t += DT
        if t >= 2.0:
            true_after = target * (1.0 - math.exp(-rate_const * t))
            assert abs(angle_diff(fs.yaw_est, true_after)) < 1e-3


def test_filter_state_validation():
    with pytest.raises(ValueError):
        FilterState(yaw_est=0.0, alpha=1.1)
    with pytest.raises(ValueError):
        FilterState(yaw_est=math.nan)
    fs = FilterState(yaw_est=0.0)
    with pytest.raises(ValueError):
        filter_update(fs, gyro_z=0.0, mag_yaw=0.0, dt=0.0)
    with pytest.raises(ValueError):
        filter_update(fs, gyro_z=math.inf, mag_yaw=0.0, dt=DT)


def test_filter_state_wraps_on_construction():
    assert FilterState(yaw_est=3 * math.pi).yaw_est == pytest.approx(math.pi)


def test_depth_averager_window():
    avg = DepthAverager(window=5)
    values = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    means = [avg.update(v) for v in values]
    assert means[0] == 1.0
    assert means[2] == pytest.approx(2.0)
    assert means[4] == pytest.approx(3.0)
    assert means[5] == pytest.approx(4.0)  # window slid past the first sample
    with pytest.raises(ValueError):
        avg.update(math.nan)
    with pytest.raises(ValueError):
        DepthAverager(window=0)
