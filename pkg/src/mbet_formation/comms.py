"""Model-based event-triggered transmission of the leader state.

Both aircraft run the same dead-reckoning model of the leader. The leader
compares the model against its true state after every step and transmits
(resetting the model to truth) once the model error is large relative to
the state itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .vehicle import AircraftState, AutopilotTimeConstants, CommandPair, integrate_step

NormScope = Literal["full_state", "velocity_heading"]


@dataclass(frozen=True, slots=True)
class LeaderModel:
    est: AircraftState
    last_update_time: float = 0.0


@dataclass(frozen=True, slots=True)
class TriggerConfig:
    """Relative trigger threshold.

    ``sigma == 0`` is accepted as the continuous-feedback limit: any nonzero
    model error transmits.
    """

    sigma: float
    norm_scope: NormScope = "full_state"

    def __post_init__(self) -> None:
        if not (0.0 <= self.sigma < 1.0):
            raise ValueError(
                f"sigma must satisfy 0 < sigma < 1 (0 selects the continuous limit), got {self.sigma}"
            )
        if self.norm_scope not in ("full_state", "velocity_heading"):
            raise ValueError(f"unknown norm_scope {self.norm_scope!r}")


@dataclass(frozen=True, slots=True)
class TriggerDecision:
    fire: bool
    error_norm: float
    threshold: float


@dataclass(frozen=True, slots=True)
class EventRecord:
    time: float
    error_norm: float
    threshold: float
    transmitted_state: AircraftState


def _components(s: AircraftState, scope: NormScope) -> tuple[float, ...]:
    if scope == "velocity_heading":
        return (s.speed, s.heading)
    return s.as_tuple()


def propagate_model(
    model: LeaderModel, tc_leader: AutopilotTimeConstants, dt: float
) -> LeaderModel:
    """Dead-reckon one step: commands frozen at the model's own speed and heading."""
    est = model.est
    # with commands equal to the state the lags are at rest; position integrates exactly
    cmd = CommandPair(est.speed, est.heading)
    return LeaderModel(integrate_step(est, cmd, tc_leader, dt), model.last_update_time)


def check_trigger(
    model: LeaderModel, truth: AircraftState, cfg: TriggerConfig
) -> TriggerDecision:
    est_c = _components(model.est, cfg.norm_scope)
    true_c = _components(truth, cfg.norm_scope)
    enorm = math.sqrt(sum((a - b) ** 2 for a, b in zip(est_c, true_c)))
    threshold = cfg.sigma * math.sqrt(sum(b * b for b in true_c))
    return TriggerDecision(enorm >= threshold and enorm > 0.0, enorm, threshold)


def apply_update(
    model: LeaderModel, truth: AircraftState, t: float, decision: TriggerDecision | None = None
) -> tuple[LeaderModel, EventRecord]:
    """Reset the model to the transmitted truth and log the event."""
    if decision is None:
        enorm = math.dist(model.est.as_tuple(), truth.as_tuple())
        record = EventRecord(t, enorm, float("nan"), truth)
    else:
        record = EventRecord(t, decision.error_norm, decision.threshold, truth)
    return LeaderModel(truth, t), record
