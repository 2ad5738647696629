import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mbet_formation.vehicle import (
    AircraftState,
    AutopilotTimeConstants,
    CommandPair,
    integrate_step,
    state_derivative,
)

TC = AutopilotTimeConstants(5.0, 3.0)


def test_derivative_at_equilibrium():
    r = state_derivative(AircraftState(0, 0, 20, 0), CommandPair(20, 0), TC)
    assert (r.pos_x, r.pos_y, r.speed, r.heading) == (20, 0, 0, 0)


def test_derivative_heading_north():
    r = state_derivative(AircraftState(0, 0, 20, math.pi / 2), CommandPair(20, math.pi / 2), TC)
    assert r.pos_x == pytest.approx(0, abs=1e-12)
    assert r.pos_y == pytest.approx(20)
    assert r.speed == 0 and r.heading == 0


def test_derivative_with_commands():
    s, c = AircraftState(0, 0, 20, 0), CommandPair(25, 1.15)
    r = state_derivative(s, c, TC)
    assert (r.pos_x, r.pos_y, r.speed) == pytest.approx((20, 0, 1))
    assert r.heading == pytest.approx(1.15 / 3)
    # forward difference of one tiny RK4 step agrees with the rate
    h = 1e-6
    s1 = integrate_step(s, c, TC, h)
    fd = [(b - a) / h for a, b in zip(s.as_tuple(), s1.as_tuple())]
    assert fd == pytest.approx([r.pos_x, r.pos_y, r.speed, r.heading], rel=1e-5, abs=1e-5)


def test_time_constants_must_be_positive():
    with pytest.raises(ValueError):
        AutopilotTimeConstants(0.0, 3.0)
    with pytest.raises(ValueError):
        AutopilotTimeConstants(5.0, -1.0)


@pytest.mark.parametrize("dt", [0.0, -0.01])
def test_integrate_rejects_bad_dt(dt):
    with pytest.raises(ValueError):
        integrate_step(AircraftState(0, 0, 20, 0), CommandPair(20, 0), TC, dt)


@pytest.mark.parametrize("heading", [0.0, 0.7, -2.0])
def test_equilibrium_step_is_straight_line(heading):
    s = AircraftState(3.0, -4.0, 20.0, heading)
    s1 = integrate_step(s, CommandPair(20.0, heading), TC, 0.1)
    assert s1.speed == 20.0 and s1.heading == heading
    assert s1.pos_x == pytest.approx(3.0 + 2.0 * math.cos(heading), abs=1e-12)
    assert s1.pos_y == pytest.approx(-4.0 + 2.0 * math.sin(heading), abs=1e-12)


def test_speed_lag_matches_exponential():
    s1 = integrate_step(AircraftState(0, 0, 20, 0), CommandPair(25, 0), TC, 0.01)
    exact = 25 + (20 - 25) * math.exp(-0.01 / 5)
    assert abs(s1.speed - exact) < 1e-9
    assert s1.speed == pytest.approx(20.00999, abs=1e-5)


def test_closed_form_lag_over_many_steps():
    tc = AutopilotTimeConstants(5.0, 3.0)
    dt = 0.01 * min(tc.tau_v, tc.tau_psi)
    s = AircraftState(0, 0, 18.0, -0.3)
    cmd = CommandPair(23.0, 0.9)
    for k in range(1, 2001):
        s = integrate_step(s, cmd, tc, dt)
    t = 2000 * dt
    v = 23.0 + (18.0 - 23.0) * math.exp(-t / tc.tau_v)
    h = 0.9 + (-0.3 - 0.9) * math.exp(-t / tc.tau_psi)
    assert abs(s.speed - v) / abs(v) < 1e-8
    assert abs(s.heading - h) / abs(h) < 1e-8


def test_richardson_step_halving():
    s = AircraftState(10.0, 5.0, 20.0, 0.3)
    c = CommandPair(26.0, 1.4)
    diffs = []
    for dt in (0.2, 0.1):
        one = integrate_step(s, c, TC, dt)
        two = integrate_step(integrate_step(s, c, TC, dt / 2), c, TC, dt / 2)
        diffs.append(np.abs(np.subtract(one.as_tuple(), two.as_tuple())))
    # local error is fifth order: halving dt shrinks the discrepancy ~32x
    ratio = diffs[0] / diffs[1]
    big = diffs[0] > 1e-13
    assert np.all(ratio[big] > 20)


@settings(max_examples=40, deadline=None)
@given(theta=st.floats(-3.0, 3.0), h0=st.floats(-0.5, 0.5), hc=st.floats(-0.5, 0.5))
def test_rotation_symmetry(theta, h0, hc):
    def run(h_init, h_cmd):
        s = AircraftState(0.0, 0.0, 20.0, h_init)
        for _ in range(200):
            s = integrate_step(s, CommandPair(22.0, h_cmd), TC, 0.01)
        return s

    a = run(h0, hc)
    b = run(h0 + theta, hc + theta)
    c, sn = math.cos(theta), math.sin(theta)
    assert b.pos_x == pytest.approx(c * a.pos_x - sn * a.pos_y, abs=1e-8)
    assert b.pos_y == pytest.approx(sn * a.pos_x + c * a.pos_y, abs=1e-8)
    assert b.heading == pytest.approx(a.heading + theta, abs=1e-12)


def test_speed_stays_nonnegative():
    s = AircraftState(0, 0, 1.0, 0)
    for _ in range(3000):
        s = integrate_step(s, CommandPair(0.0, 0.0), TC, 0.01)
        assert s.speed >= 0


def test_deterministic():
    def run():
        s = AircraftState(1, 2, 20, 0.1)
        for _ in range(500):
            s = integrate_step(s, CommandPair(24, 1.0), TC, 0.01)
        return s.as_tuple()

    assert run() == run()
