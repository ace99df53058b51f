"""PI law and mixer tests: closed forms, anti-windup, passthrough."""

import math

import numpy as np
import pytest

from rovsim.control import (
    DEPTH_GAINS,
    YAW_GAINS,
    ControlSetpoints,
    Mode,
    PIGains,
    PIState,
    control_step,
    pi_step,
)
from rovsim.dynamics import ThrusterDuties

DT = 0.02
WIDE = PIGains(kp=2.0, ki=0.5, out_min=-1e9, out_max=1e9, integral_limit=1e9)


def test_zero_error_zero_output():
    st = PIState()
    for _ in range(100):
        out, st = pi_step(WIDE, st, 0.0, DT)
        assert out == 0.0
    assert st.integral == 0.0


def test_constant_error_closed_form():
    # unclamped: u(t) = kp*e + ki*e*t
    st = PIState()
    t = 0.0
    out = 0.0
    for _ in range(100):
        out, st = pi_step(WIDE, st, 1.0, DT)
        t += DT
        assert out == pytest.approx(2.0 * 1.0 + 0.5 * 1.0 * t, abs=1e-9)
    assert t == pytest.approx(2.0, abs=1e-12)
    assert out == pytest.approx(3.0, abs=1e-9)


def test_proportional_saturation_hand_value():
    gains = PIGains(kp=2.0, ki=0.0, out_min=-0.4, out_max=0.4)
    out, _ = pi_step(gains, PIState(), 0.25, DT)
    assert out == 0.4  # raw 0.5, clamped


def test_gain_doubling_doubles_unclamped_output():
    rng = np.random.default_rng(2)
    errors = rng.uniform(-2, 2, size=300)
    single = PIGains(kp=0.7, ki=0.3, out_min=-1e9, out_max=1e9, integral_limit=1e9)
    double = PIGains(kp=1.4, ki=0.6, out_min=-1e9, out_max=1e9, integral_limit=1e9)
    s1, s2 = PIState(), PIState()
    for e in errors:
        o1, s1 = pi_step(single, s1, float(e), DT)
        o2, s2 = pi_step(double, s2, float(e), DT)
        assert o2 == pytest.approx(2.0 * o1, rel=1e-12, abs=1e-15)


def test_integral_never_exceeds_limit():
    st = PIState()
    for _ in range(2000):
        _, st = pi_step(YAW_GAINS, st, 1.0, DT)
        assert abs(st.integral) <= YAW_GAINS.integral_limit + 1e-15
    for _ in range(2000):
        _, st = pi_step(YAW_GAINS, st, -5.0, DT)
        assert abs(st.integral) <= YAW_GAINS.integral_limit + 1e-15


def test_antiwindup_desaturates_within_ten_steps():
    st = PIState()
    out = 0.0
    for _ in range(500):
        out, st = pi_step(YAW_GAINS, st, 1.0, DT)
    assert out == YAW_GAINS.out_max  # persistent error saturates the output
    steps = 0
    while True:
        out, st = pi_step(YAW_GAINS, st, -1.0, DT)
        steps += 1
        if out < YAW_GAINS.out_max:
            break
        assert steps <= 10
    assert steps <= 10


def test_integral_frozen_while_driving_deeper_into_saturation():
    gains = PIGains(kp=1.0, ki=1.0, out_min=-1.0, out_max=1.0, integral_limit=10.0)
    st = PIState()
    # one big error saturates immediately; integral must stop advancing
    _, st = pi_step(gains, st, 5.0, DT)
    frozen = st.integral
    for _ in range(50):
        _, st = pi_step(gains, st, 5.0, DT)
        assert st.integral == frozen


def test_pi_validation():
    with pytest.raises(ValueError):
        PIGains(kp=-0.1, ki=0.0)
    with pytest.raises(ValueError):
        PIGains(kp=0.1, ki=0.0, out_min=1.0, out_max=-1.0)
    with pytest.raises(ValueError):
        pi_step(WIDE, PIState(), math.nan, DT)
    with pytest.raises(ValueError):
        pi_step(WIDE, PIState(), 0.0, 0.0)


# -- control_step -------------------------------------------------------------


def closed_loop(**kwargs):
    defaults = dict(mode=Mode.CLOSED_LOOP, yaw_ref=0.0, depth_ref=0.0, surge_duty=0.0)
    defaults.update(kwargs)
    return ControlSetpoints(**defaults)


def test_manual_mode_is_exact_passthrough():
    sp = ControlSetpoints(mode=Mode.MANUAL, manual_duties=ThrusterDuties(0.2, 0.2, -0.5))
    duties, ys, ds = control_step(sp, 1.0, 5.0, YAW_GAINS, PIState(integral=0.3), DEPTH_GAINS, PIState(), DT)
    assert (duties.left, duties.right, duties.vertical) == (0.2, 0.2, -0.5)
    assert ys.integral == 0.3  # untouched


def test_symmetric_surge_passthrough_at_zero_error():
    duties, _, _ = control_step(
        closed_loop(surge_duty=0.5), 0.0, 0.0, YAW_GAINS, PIState(), DEPTH_GAINS, PIState(), DT
    )
    assert duties.left == pytest.approx(0.5)
    assert duties.right == pytest.approx(0.5)
    assert duties.vertical == 0.0


def test_pure_differential_yaw_command():
    gains = PIGains(kp=1.0, ki=0.0)
    duties, _, _ = control_step(
        closed_loop(yaw_ref=0.3), 0.0, 0.0, gains, PIState(), DEPTH_GAINS, PIState(), DT
    )
    assert duties.left == pytest.approx(0.3, abs=1e-12)
    assert duties.right == pytest.approx(-0.3, abs=1e-12)


def test_yaw_error_uses_shortest_arc():
    gains = PIGains(kp=1.0, ki=0.0)
    # ref just past the seam from the estimate: error must be small negative
    duties, _, _ = control_step(
        closed_loop(yaw_ref=-3.1), 3.1, 0.0, gains, PIState(), DEPTH_GAINS, PIState(), DT
    )
    err = (2 * math.pi - 6.2)
    assert duties.left == pytest.approx(err, abs=1e-9)


def test_mixer_linearity_inside_limits():
    rng = np.random.default_rng(8)
    gains = PIGains(kp=1.0, ki=0.0)
    for _ in range(300):
        surge = float(rng.uniform(-0.4, 0.4))
        yaw_err = float(rng.uniform(-0.4, 0.4))
        duties, _, _ = control_step(
            closed_loop(yaw_ref=yaw_err, surge_duty=surge),
            0.0, 0.0, gains, PIState(), DEPTH_GAINS, PIState(), DT,
        )
        assert duties.left + duties.right == pytest.approx(2 * surge, abs=1e-12)
        assert duties.left - duties.right == pytest.approx(2 * yaw_err, abs=1e-12)


def test_depth_error_sign_drives_dive():
    # deeper reference than estimate -> positive (downward) vertical duty
    duties, _, _ = control_step(
        closed_loop(depth_ref=1.0), 0.0, 0.0, YAW_GAINS, PIState(), DEPTH_GAINS, PIState(), DT
    )
    assert duties.vertical > 0.0


def test_setpoints_validation():
    with pytest.raises(ValueError):
        ControlSetpoints(depth_ref=-1.0)
    sp = ControlSetpoints(yaw_ref=3 * math.pi, surge_duty=2.0)
    assert sp.yaw_ref == pytest.approx(math.pi)
    assert sp.surge_duty == 1.0
