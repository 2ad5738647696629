"""Two-channel PI formation controller and its gain stability conditions.

The longitudinal (x) channel commands wingman speed from
``e_x = K_x x_err + K_V (vL_err - vW_err)``; the lateral (y) channel
commands wingman heading from ``e_y = K_y y_err + K_psi (psi_L - psi_W)``.
Each command is ``Kp * e + Ki * integral(e)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .geometry import FormationSpec
from .vehicle import CommandPair


@dataclass(frozen=True, slots=True)
class XChannelGains:
    kxp: float
    kxi: float
    kx: float
    kv: float


@dataclass(frozen=True, slots=True)
class YChannelGains:
    kyp: float
    kyi: float
    ky: float
    kpsi: float


@dataclass(frozen=True, slots=True)
class PIControllerState:
    """Trapezoidal integrals of the channel errors.

    ``prev_ex``/``prev_ey`` hold the last sampled errors; ``None`` until the
    first sample, which contributes no area.
    """

    int_ex: float = 0.0
    int_ey: float = 0.0
    prev_ex: float | None = None
    prev_ey: float | None = None


def channel_errors(
    err: np.ndarray, gx: XChannelGains, gy: YChannelGains
) -> tuple[float, float]:
    x_err, vw_err, vl_err, y_err, psi_w, psi_l = (float(v) for v in err)
    e_x = gx.kx * x_err + gx.kv * (vl_err - vw_err)
    e_y = gy.ky * y_err + gy.kpsi * (psi_l - psi_w)
    return e_x, e_y


def pi_step(
    err: np.ndarray,
    gx: XChannelGains,
    gy: YChannelGains,
    pistate: PIControllerState,
    spec: FormationSpec,
    dt: float,
) -> tuple[CommandPair, PIControllerState]:
    """Sample the channel errors, advance the integrals and form the commands.

    The speed command is ``V_n`` plus the x-channel output; the heading
    command is the y-channel output itself.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    e_x, e_y = channel_errors(err, gx, gy)
    int_ex, int_ey = pistate.int_ex, pistate.int_ey
    if pistate.prev_ex is not None:
        int_ex += 0.5 * dt * (pistate.prev_ex + e_x)
    if pistate.prev_ey is not None:
        int_ey += 0.5 * dt * (pistate.prev_ey + e_y)
    cmd = CommandPair(
        spec.nominal_speed + gx.kxp * e_x + gx.kxi * int_ex,
        gy.kyp * e_y + gy.kyi * int_ey,
    )
    return cmd, PIControllerState(int_ex, int_ey, e_x, e_y)


# -- stability conditions ----------------------------------------------------


@dataclass(frozen=True)
class Condition:
    label: str
    lhs: float
    rhs: float
    op: Literal[">", "<"]

    @property
    def passed(self) -> bool:
        return self.lhs > self.rhs if self.op == ">" else self.lhs < self.rhs


@dataclass(frozen=True)
class StabilityVerdict:
    channel: str
    conditions: tuple[Condition, ...] = field(default_factory=tuple)

    @property
    def stable(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def failed(self) -> list[int]:
        """1-based indices of violated conditions."""
        return [i + 1 for i, c in enumerate(self.conditions) if not c.passed]


def check_stability_x(gx: XChannelGains, tau_vw: float) -> StabilityVerdict:
    if not tau_vw > 0:
        raise ValueError("tau_vw must be positive")
    c1 = gx.kxp * gx.kv + 1.0
    c2 = gx.kx * gx.kxi
    lhs3 = gx.kxp * gx.kx + gx.kv * gx.kxi
    # c1 <= 0 already fails condition 1; the bound is then meaningless
    rhs3 = tau_vw * c2 / c1 if c1 != 0 else float("inf")
    return StabilityVerdict(
        "x",
        (
            Condition("Kxp*KV + 1 > 0", c1, 0.0, ">"),
            Condition("Kx*KxI > 0", c2, 0.0, ">"),
            Condition("Kxp*Kx + KV*KxI > tau_VW*Kx*KxI/(Kxp*KV + 1)", lhs3, rhs3, ">"),
        ),
    )


def check_stability_y(
    gy: YChannelGains, tau_psiw: float, spec: FormationSpec
) -> StabilityVerdict:
    if not tau_psiw > 0:
        raise ValueError("tau_psiw must be positive")
    xr, vn = spec.lon_ref, spec.nominal_speed
    c1 = gy.kyp * gy.kpsi - xr * gy.ky * gy.kyp + 1.0
    c2 = gy.ky * gy.kyi
    lhs3 = gy.kyi * gy.kpsi - gy.ky * (vn * gy.kyp + xr * gy.kyi)
    rhs3 = -tau_psiw * vn * c2 / c1 if c1 != 0 else float("inf")
    return StabilityVerdict(
        "y",
        (
            Condition("Kyp*Kpsi - xr*Ky*Kyp + 1 > 0", c1, 0.0, ">"),
            Condition("Ky*KyI < 0", c2, 0.0, "<"),
            Condition(
                "KyI*Kpsi - Ky*(Vn*Kyp + xr*KyI) > -tau_PsiW*Vn*Ky*KyI/(Kyp*Kpsi - xr*Ky*Kyp + 1)",
                lhs3,
                rhs3,
                ">",
            ),
        ),
    )


def closed_loop_channel_matrix(
    channel: Literal["x", "y"],
    gains: XChannelGains | YChannelGains,
    tau: float,
    spec: FormationSpec | None = None,
) -> np.ndarray:
    """Single-channel closed loop with the leader terms removed.

    States are ``[x_err, vW_err, int_ex]`` for the x channel and
    ``[y_err, psi_W, int_ey]`` for the y channel. Built from the linear
    error dynamics directly, not from the characteristic polynomial.
    """
    if channel == "x":
        g = gains
        # e_x = Kx*x - KV*vW ; vW' = (-vW + Kxp*e_x + KxI*z)/tau ; x' = -vW ; z' = e_x
        ex_row = np.array([g.kx, -g.kv, 0.0])
        m = np.zeros((3, 3))
        m[0] = [0.0, -1.0, 0.0]
        m[1] = (np.array([0.0, -1.0, 0.0]) + g.kxp * ex_row + np.array([0.0, 0.0, g.kxi])) / tau
        m[2] = ex_row
        return m
    if channel == "y":
        if spec is None:
            raise ValueError("y channel needs the formation spec")
        g = gains
        xr, vn = spec.lon_ref, spec.nominal_speed
        ey_row = np.array([g.ky, -g.kpsi, 0.0])
        u_row = g.kyp * ey_row + np.array([0.0, 0.0, g.kyi])
        psi_row = (np.array([0.0, -1.0, 0.0]) + u_row) / tau
        m = np.zeros((3, 3))
        m[0] = np.array([0.0, vn - xr / tau, 0.0]) + (xr / tau) * u_row
        m[1] = psi_row
        m[2] = ey_row
        return m
    raise ValueError(f"unknown channel {channel!r}")


def characteristic_coefficients(
    channel: Literal["x", "y"],
    gains: XChannelGains | YChannelGains,
    tau: float,
    spec: FormationSpec | None = None,
) -> tuple[float, float, float, float]:
    """Cubic ``a3 s^3 + a2 s^2 + a1 s + a0`` of the closed-loop channel."""
    if channel == "x":
        g = gains
        return (tau, 1.0 + g.kxp * g.kv, g.kxp * g.kx + g.kv * g.kxi, g.kx * g.kxi)
    g = gains
    xr, vn = spec.lon_ref, spec.nominal_speed
    return (
        tau,
        1.0 + g.kyp * g.kpsi - xr * g.ky * g.kyp,
        g.kyi * g.kpsi - g.ky * (vn * g.kyp + xr * g.kyi),
        -g.ky * g.kyi * vn,
    )


def eigen_stable(m: np.ndarray) -> bool:
    return bool(np.max(np.linalg.eigvals(m).real) < 0.0)


def coupled_closed_loop_matrix(
    lin, gx: XChannelGains, gy: YChannelGains
) -> np.ndarray:
    """8-state closed loop: the 6 error states plus both integrators.

    The leader's speed and heading keep their open-loop lags (no feedback
    enters them), so only the wingman-side modes are shaped by the gains.
    """
    A, B = lin.A, lin.B
    # e = Ce @ x
    cex = np.array([gx.kx, -gx.kv, gx.kv, 0.0, 0.0, 0.0])
    cey = np.array([0.0, 0.0, 0.0, gy.ky, -gy.kpsi, gy.kpsi])
    K = np.vstack([gx.kxp * cex, gy.kyp * cey])
    Ki = np.diag([gx.kxi, gy.kyi])
    m = np.zeros((8, 8))
    m[:6, :6] = A + B @ K
    m[:6, 6:] = B @ Ki
    m[6, :6] = cex
    m[7, :6] = cey
    return m

