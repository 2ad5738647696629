"""Planar kinematics of the leader and wingman aircraft.

Each vehicle is a point mass moving along its heading, with speed and
heading following first-order lags toward their commands (the closed-loop
response of an inner autopilot):

    x' = V cos(psi)     V'   = (V_c - V) / tau_v
    y' = V sin(psi)     psi' = (psi_c - psi) / tau_psi

Headings are never wrapped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class AircraftState:
    """Absolute kinematic state: position [m], speed [m/s], heading [rad]."""

    pos_x: float
    pos_y: float
    speed: float
    heading: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.pos_x, self.pos_y, self.speed, self.heading)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())


@dataclass(frozen=True, slots=True)
class AircraftStateRate:
    pos_x: float
    pos_y: float
    speed: float
    heading: float


@dataclass(frozen=True, slots=True)
class AutopilotTimeConstants:
    """Time constants [s] of the speed and heading lags."""

    tau_v: float
    tau_psi: float

    def __post_init__(self) -> None:
        if not (self.tau_v > 0 and self.tau_psi > 0):
            raise ValueError(
                f"time constants must be positive, got tau_v={self.tau_v}, tau_psi={self.tau_psi}"
            )


@dataclass(frozen=True, slots=True)
class CommandPair:
    speed_cmd: float
    heading_cmd: float


def state_derivative(
    state: AircraftState, cmd: CommandPair, tc: AutopilotTimeConstants
) -> AircraftStateRate:
    return AircraftStateRate(
        state.speed * math.cos(state.heading),
        state.speed * math.sin(state.heading),
        (cmd.speed_cmd - state.speed) / tc.tau_v,
        (cmd.heading_cmd - state.heading) / tc.tau_psi,
    )


def _rates(s, vc, hc, tv, tp):
    x, y, v, h = s
    return (v * math.cos(h), v * math.sin(h), (vc - v) / tv, (hc - h) / tp)


def integrate_step(
    state: AircraftState, cmd: CommandPair, tc: AutopilotTimeConstants, dt: float
) -> AircraftState:
    """Advance ``state`` by one classical RK4 step with ``cmd`` held constant.

    Raises:
        ValueError: if ``dt`` is not strictly positive.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    vc, hc = cmd.speed_cmd, cmd.heading_cmd
    tv, tp = tc.tau_v, tc.tau_psi
    s0 = state.as_tuple()
    k1 = _rates(s0, vc, hc, tv, tp)
    h2 = 0.5 * dt
    k2 = _rates(tuple(a + h2 * b for a, b in zip(s0, k1)), vc, hc, tv, tp)
    k3 = _rates(tuple(a + h2 * b for a, b in zip(s0, k2)), vc, hc, tv, tp)
    k4 = _rates(tuple(a + dt * b for a, b in zip(s0, k3)), vc, hc, tv, tp)
    w = dt / 6.0
    return AircraftState(
        *(a + w * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(s0, k1, k2, k3, k4))
    )
