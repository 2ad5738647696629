"""Fixed-step closed-loop simulation of the leader-wingman formation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .comms import (
    EventRecord,
    LeaderModel,
    TriggerConfig,
    apply_update,
    check_trigger,
    propagate_model,
)
from .control import (
    PIControllerState,
    XChannelGains,
    YChannelGains,
    check_stability_x,
    check_stability_y,
    pi_step,
)
from .geometry import DegenerateGeometryError, FormationSpec, relative_geometry
from .linear_model import error_state
from .vehicle import AircraftState, AutopilotTimeConstants, CommandPair, integrate_step

TRAJ_COLUMNS = (
    "t", "xL", "yL", "VL", "psiL", "xW", "yW", "VW", "psiW",
    "R", "lambda", "sepx", "sepy", "VWc", "psiWc", "enorm", "ethresh", "event",
)
# in-memory only: the leader model and the geometry the wingman acts on
EXTRA_COLUMNS = ("xLhat", "yLhat", "VLhat", "psiLhat", "sepx_hat", "sepy_hat")
COL = {name: i for i, name in enumerate(TRAJ_COLUMNS + EXTRA_COLUMNS)}


class SimulationAbort(RuntimeError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"simulation aborted at step {step}: {reason}")
        self.step = step
        self.reason = reason


@dataclass(frozen=True)
class Scenario:
    duration: float
    dt: float
    spec: FormationSpec
    tc_leader: AutopilotTimeConstants
    tc_wingman: AutopilotTimeConstants
    gains_x: XChannelGains
    gains_y: YChannelGains
    trigger: TriggerConfig
    leader_init: AircraftState
    wingman_init: AircraftState
    leader_command_schedule: tuple[tuple[float, CommandPair], ...]

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if not (0 < self.dt <= self.duration):
            raise ValueError(f"dt must satisfy 0 < dt <= duration, got dt={self.dt}")
        sched = self.leader_command_schedule
        if not sched or sched[0][0] != 0.0:
            raise ValueError("leader_command_schedule must start at t=0")
        times = [t for t, _ in sched]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("leader_command_schedule times must be non-decreasing")

    @property
    def n_steps(self) -> int:
        # guard against 100/0.01 = 9999.999... style truncation
        return int(math.floor(self.duration / self.dt + 1e-9))

    def leader_command(self, t: float) -> CommandPair:
        tol = 1e-9 * self.dt
        current = self.leader_command_schedule[0][1]
        for t_i, cmd in self.leader_command_schedule:
            if t_i <= t + tol:
                current = cmd
            else:
                break
        return current


@dataclass
class TrajectoryLog:
    """Per-step rows with columns ``TRAJ_COLUMNS + EXTRA_COLUMNS``.

    ``R``, ``lambda``, ``sepx`` and ``sepy`` are the true geometry; the
    ``*_hat`` columns hold what the wingman perceives through the model.
    """

    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, COL[name]]


def run_scenario(
    s: Scenario, feedback: Literal["model", "truth"] = "model"
) -> tuple[TrajectoryLog, list[EventRecord]]:
    """Simulate ``s`` and return the trajectory log and the event list.

    At each instant t_k the leader-side trigger is evaluated first (the model
    and the leader having been advanced to t_k together), then the wingman
    forms its commands from the model's leader state and its own true
    state, and finally all plants advance one step. With
    ``feedback="truth"`` the controller reads the true leader state and no
    events are generated.

    Raises:
        SimulationAbort: on zero range or a non-finite state.
    """
    sx = check_stability_x(s.gains_x, s.tc_wingman.tau_v)
    sy = check_stability_y(s.gains_y, s.tc_wingman.tau_psi, s.spec)
    meta = {"stable_x": sx.stable, "stable_y": sy.stable, "feedback": feedback}
    if not (sx.stable and sy.stable):
        warnings.warn(
            f"gains violate the stability conditions (x failed {sx.failed}, y failed {sy.failed})",
            RuntimeWarning,
            stacklevel=2,
        )

    dt, n = s.dt, s.n_steps
    leader, wingman = s.leader_init, s.wingman_init
    model = LeaderModel(leader, 0.0)
    pistate = PIControllerState()
    events: list[EventRecord] = []
    rows = []

    for k in range(n + 1):
        t = k * dt
        enorm = thresh = 0.0
        fired = False
        if feedback == "model" and k > 0:
            decision = check_trigger(model, leader, s.trigger)
            enorm, thresh = decision.error_norm, decision.threshold
            if decision.fire:
                model, rec = apply_update(model, leader, t, decision)
                events.append(rec)
                fired = True
        seen = model.est if feedback == "model" else leader

        try:
            err = error_state(seen, wingman, s.spec)
        except DegenerateGeometryError as exc:
            raise SimulationAbort(k, str(exc)) from exc
        cmd_w, pistate = pi_step(err, s.gains_x, s.gains_y, pistate, s.spec, dt)
        sep_hat_x = float(err[0]) + s.spec.lon_ref
        sep_hat_y = float(err[3]) + s.spec.lat_ref

        g = relative_geometry(leader, wingman)
        rows.append(
            (t, *leader.as_tuple(), *wingman.as_tuple(),
             g.range, g.bearing, g.lon_sep, g.lat_sep,
             cmd_w.speed_cmd, cmd_w.heading_cmd, enorm, thresh, 1.0 if fired else 0.0,
             *seen.as_tuple(), sep_hat_x, sep_hat_y)
        )
        if not all(math.isfinite(v) for v in rows[-1]):
            raise SimulationAbort(k, "non-finite state")
        if k == n:
            break

        leader = integrate_step(leader, s.leader_command(t), s.tc_leader, dt)
        if feedback == "model":
            model = propagate_model(model, s.tc_leader, dt)
        wingman = integrate_step(wingman, cmd_w, s.tc_wingman, dt)

    return TrajectoryLog(np.array(rows), meta), events


# -- reporting ---------------------------------------------------------------


def settling_time(
    log: TrajectoryLog, spec: FormationSpec, band: float = 0.5,
    start: float = 0.0, end: float | None = None,
) -> float:
    """Time at which both separation errors enter ``band`` for good within [start, end].

    Returns ``start`` if they never leave the band and ``inf`` if they are
    still outside at ``end``.
    """
    t = log["t"]
    end = t[-1] if end is None else end
    mask = (t >= start - 1e-12) & (t <= end + 1e-12)
    tt = t[mask]
    out = (np.abs(log["sepx"][mask] - spec.lon_ref) >= band) | (
        np.abs(log["sepy"][mask] - spec.lat_ref) >= band
    )
    if not out.any():
        return float(tt[0])
    last = int(np.flatnonzero(out)[-1])
    if last == len(tt) - 1:
        return float("inf")
    return float(tt[last + 1])


@dataclass(frozen=True)
class SummaryReport:
    steps: int
    event_count: int
    communication_ratio: float
    mean_inter_event: float
    min_inter_event: float
    settling: tuple[tuple[float, float, float], ...]
    final_sep_err: tuple[float, float]
    stable_x: bool
    stable_y: bool
    band: float

    def lines(self) -> list[str]:
        out = [
            f"steps: {self.steps}",
            f"events: {self.event_count}",
            f"communication_ratio: {self.communication_ratio:.9g}",
            f"mean_inter_event_time: {self.mean_inter_event:.9g}",
            f"min_inter_event_time: {self.min_inter_event:.9g}",
            f"settling_band: {self.band:.9g}",
        ]
        for i, (a, b, ts) in enumerate(self.settling):
            out.append(f"segment_{i}: [{a:.9g}, {b:.9g}] settling_time: {ts:.9g}")
        converged = all(math.isfinite(ts) for _, _, ts in self.settling)
        out += [
            f"final_sepx_error: {self.final_sep_err[0]:.9g}",
            f"final_sepy_error: {self.final_sep_err[1]:.9g}",
            f"converged: {'yes' if converged else 'no'}",
            f"gains_stable_x: {'yes' if self.stable_x else 'no'}",
            f"gains_stable_y: {'yes' if self.stable_y else 'no'}",
        ]
        return out


def summarize(
    log: TrajectoryLog, events: list[EventRecord], s: Scenario, band: float = 0.5
) -> SummaryReport:
    if len(log) == 0:
        raise ValueError("empty log")
    t_end = float(log["t"][-1])
    bounds = sorted({t for t, _ in s.leader_command_schedule} | {t_end})
    segments = tuple(
        (a, b, settling_time(log, s.spec, band, a, b)) for a, b in zip(bounds, bounds[1:])
    )
    times = [e.time for e in events]
    gaps = np.diff(times) if len(times) > 1 else np.array([])
    steps = len(log) - 1
    return SummaryReport(
        steps=steps,
        event_count=len(events),
        communication_ratio=len(events) / steps if steps else 0.0,
        mean_inter_event=float(gaps.mean()) if gaps.size else float("nan"),
        min_inter_event=float(gaps.min()) if gaps.size else float("nan"),
        settling=segments,
        final_sep_err=(
            float(log["sepx"][-1] - s.spec.lon_ref),
            float(log["sepy"][-1] - s.spec.lat_ref),
        ),
        stable_x=bool(log.meta.get("stable_x", True)),
        stable_y=bool(log.meta.get("stable_y", True)),
        band=band,
    )
