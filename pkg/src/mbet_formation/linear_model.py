"""Linearized formation error dynamics ``x' = A x + B u + E d`` about trim.

State ordering is ``[x_err, vW_err, vL_err, y_err, psi_W, psi_L]``,
control ``u = [V_Wc, psi_Wc]`` and exogenous leader command
``d = [V_Lc, psi_Lc]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DegenerateGeometryError, FormationSpec, relative_geometry
from .vehicle import AircraftState, AutopilotTimeConstants

STATE_LABELS = ("x_err", "vW_err", "vL_err", "y_err", "psi_W", "psi_L")


@dataclass(frozen=True)
class LinearizedSystem:
    A: np.ndarray
    B: np.ndarray
    E: np.ndarray


def build_linear_system(
    spec: FormationSpec,
    tc_leader: AutopilotTimeConstants,
    tc_wingman: AutopilotTimeConstants,
) -> LinearizedSystem:
    xr, yr, vn = spec.lon_ref, spec.lat_ref, spec.nominal_speed
    tvw, tpw = tc_wingman.tau_v, tc_wingman.tau_psi
    tvl, tpl = tc_leader.tau_v, tc_leader.tau_psi

    A = np.zeros((6, 6))
    # upper-left block: longitudinal channel
    A[0, 1], A[0, 2] = -1.0, 1.0
    A[1, 1] = -1.0 / tvw
    A[2, 2] = -1.0 / tvl
    # upper-right block: heading coupling through the lateral reference
    A[0, 4] = yr / tpw
    # lower-right block: lateral channel
    A[3, 4] = vn - xr / tpw
    A[3, 5] = -vn
    A[4, 4] = -1.0 / tpw
    A[5, 5] = -1.0 / tpl

    B = np.zeros((6, 2))
    B[0, 1] = 0.0 - yr / tpw  # no negative zero when yr == 0
    B[1, 0] = 1.0 / tvw
    B[3, 1] = xr / tpw
    B[4, 1] = 1.0 / tpw

    E = np.zeros((6, 2))
    E[2, 0] = 1.0 / tvl
    E[5, 1] = 1.0 / tpl
    return LinearizedSystem(A, B, E)


def error_state(
    leader: AircraftState, wingman: AircraftState, spec: FormationSpec
) -> np.ndarray:
    """Map absolute states to the 6-entry error vector.

    Raises:
        DegenerateGeometryError: at zero range.
    """
    g = relative_geometry(leader, wingman)
    if g.degenerate:
        raise DegenerateGeometryError("range is zero; separations undefined")
    vn = spec.nominal_speed
    return np.array(
        [
            g.lon_sep - spec.lon_ref,
            wingman.speed - vn,
            leader.speed - vn,
            g.lat_sep - spec.lat_ref,
            wingman.heading,
            leader.heading,
        ]
    )


def nonlinear_error_dynamics(
    err: np.ndarray,
    u: np.ndarray,
    d: np.ndarray,
    spec: FormationSpec,
    tc_leader: AutopilotTimeConstants,
    tc_wingman: AutopilotTimeConstants,
) -> np.ndarray:
    """Exact vector field of the error state (separation rates plus the lags)."""
    x = err[0] + spec.lon_ref
    y = err[3] + spec.lat_ref
    vw = err[1] + spec.nominal_speed
    vl = err[2] + spec.nominal_speed
    psi_w, psi_l = err[4], err[5]
    psi_w_dot = (u[1] - psi_w) / tc_wingman.tau_psi
    psi_e = psi_l - psi_w
    return np.array(
        [
            vl * math.cos(psi_e) - vw - y * psi_w_dot,
            (u[0] - vw) / tc_wingman.tau_v,
            (d[0] - vl) / tc_leader.tau_v,
            x * psi_w_dot - vl * math.sin(psi_e),
            psi_w_dot,
            (d[1] - psi_l) / tc_leader.tau_psi,
        ]
    )


def trim_point(spec: FormationSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Error state, control and exogenous input at the trim equilibrium."""
    vn = spec.nominal_speed
    return np.zeros(6), np.array([vn, 0.0]), np.array([vn, 0.0])


def finite_difference_jacobians(
    spec: FormationSpec,
    tc_leader: AutopilotTimeConstants,
    tc_wingman: AutopilotTimeConstants,
    step: float = 1e-5,
) -> LinearizedSystem:
    """Central-difference Jacobians of the nonlinear error dynamics at trim."""
    x0, u0, d0 = trim_point(spec)

    def f(x, u, d):
        return nonlinear_error_dynamics(x, u, d, spec, tc_leader, tc_wingman)

    def jac(which: int, n: int) -> np.ndarray:
        cols = []
        for j in range(n):
            args_p = [x0.copy(), u0.copy(), d0.copy()]
            args_m = [x0.copy(), u0.copy(), d0.copy()]
            args_p[which][j] += step
            args_m[which][j] -= step
            cols.append((f(*args_p) - f(*args_m)) / (2.0 * step))
        return np.column_stack(cols)

    return LinearizedSystem(jac(0, 6), jac(1, 2), jac(2, 2))


def max_jacobian_mismatch(
    lin: LinearizedSystem, fd: LinearizedSystem
) -> dict[str, float]:
    return {
        "A": float(np.max(np.abs(lin.A - fd.A))),
        "B": float(np.max(np.abs(lin.B - fd.B))),
        "E": float(np.max(np.abs(lin.E - fd.E))),
    }
