"""Leader-wingman formation control with model-based event-triggered communication."""

__version__ = "0.1.0"

from .comms import EventRecord, LeaderModel, TriggerConfig, apply_update, check_trigger, propagate_model
from .control import (
    PIControllerState,
    XChannelGains,
    YChannelGains,
    check_stability_x,
    check_stability_y,
    closed_loop_channel_matrix,
    pi_step,
)
from .geometry import FormationSpec, RelativeGeometry, relative_geometry, relative_rates
from .linear_model import build_linear_system, error_state
from .sim import Scenario, TrajectoryLog, run_scenario, summarize
from .vehicle import AircraftState, AutopilotTimeConstants, CommandPair, integrate_step, state_derivative
