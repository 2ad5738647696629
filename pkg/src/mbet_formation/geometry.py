"""Relative geometry of the leader as seen from the wingman's heading frame."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .vehicle import AircraftState


class DegenerateGeometryError(ValueError):
    """Leader and wingman occupy the same point, so the bearing is undefined."""


@dataclass(frozen=True, slots=True)
class FormationSpec:
    """Desired separations [m] and the nominal speed [m/s] of the trim point."""

    lon_ref: float
    lat_ref: float
    nominal_speed: float

    def __post_init__(self) -> None:
        if not self.nominal_speed > 0:
            raise ValueError(f"nominal_speed must be positive, got {self.nominal_speed}")


@dataclass(frozen=True, slots=True)
class RelativeGeometry:
    range: float
    bearing: float
    lon_sep: float
    lat_sep: float
    heading_err: float
    degenerate: bool = False


def relative_geometry(leader: AircraftState, wingman: AircraftState) -> RelativeGeometry:
    """Range, bearing and wingman-frame separations of the leader.

    At zero range the bearing is set to 0 and the result is flagged
    ``degenerate`` instead of raising.
    """
    dx = leader.pos_x - wingman.pos_x
    dy = leader.pos_y - wingman.pos_y
    r = math.hypot(dx, dy)
    degenerate = r == 0.0
    lam = 0.0 if degenerate else math.atan2(dy, dx)
    rel = wingman.heading - lam
    return RelativeGeometry(
        range=r,
        bearing=lam,
        lon_sep=r * math.cos(rel),
        lat_sep=r * math.sin(rel),
        heading_err=leader.heading - wingman.heading,
        degenerate=degenerate,
    )


def relative_rates(
    leader: AircraftState, wingman: AircraftState, wingman_heading_rate: float
) -> tuple[float, float, float, float]:
    """Return ``(R_dot, lambda_dot, x_dot, y_dot)`` from the analytic rate laws.

    Raises:
        DegenerateGeometryError: at zero range.
    """
    g = relative_geometry(leader, wingman)
    if g.degenerate:
        raise DegenerateGeometryError("range is zero; bearing rate undefined")
    vl, vw = leader.speed, wingman.speed
    a_l = leader.heading - g.bearing
    a_w = wingman.heading - g.bearing
    r_dot = vl * math.cos(a_l) - vw * math.cos(a_w)
    lam_dot = (vl * math.sin(a_l) - vw * math.sin(a_w)) / g.range
    x_dot = vl * math.cos(g.heading_err) - vw - g.lat_sep * wingman_heading_rate
    y_dot = g.lon_sep * wingman_heading_rate - vl * math.sin(g.heading_err)
    return r_dot, lam_dot, x_dot, y_dot


def leader_position_for(
    wingman: AircraftState, lon_sep: float, lat_sep: float
) -> tuple[float, float]:
    """Invert the separation formulas: leader position giving ``(lon_sep, lat_sep)``."""
    c, s = math.cos(wingman.heading), math.sin(wingman.heading)
    dx = lon_sep * c + lat_sep * s
    dy = lon_sep * s - lat_sep * c
    return wingman.pos_x + dx, wingman.pos_y + dy
