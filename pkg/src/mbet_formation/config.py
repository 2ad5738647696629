"""JSON scenario configuration: schema validation and conversion to ``Scenario``."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .comms import TriggerConfig
from .control import XChannelGains, YChannelGains
from .geometry import FormationSpec, leader_position_for
from .sim import Scenario
from .vehicle import AircraftState, AutopilotTimeConstants, CommandPair


class ConfigError(ValueError):
    """Invalid scenario configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _obj(props: dict, required: list[str] | None = None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": False,
    }


_NUM = {"type": "number"}
_STATE = _obj({k: _NUM for k in ("pos_x", "pos_y", "speed", "heading")})
_RELATIVE_STATE = _obj({k: _NUM for k in ("lon_sep", "lat_sep", "speed", "heading")})
_TC = _obj({"tau_v": _NUM, "tau_psi": _NUM})

SCHEMA = _obj(
    {
        "name": {"type": "string"},
        "duration": _NUM,
        "dt": _NUM,
        "formation": _obj({"lon_ref": _NUM, "lat_ref": _NUM, "nominal_speed": _NUM}),
        "leader_time_constants": _TC,
        "wingman_time_constants": _TC,
        "gains_x": _obj({k: _NUM for k in ("kxp", "kxi", "kx", "kv")}),
        "gains_y": _obj({k: _NUM for k in ("kyp", "kyi", "ky", "kpsi")}),
        "trigger": _obj(
            {"sigma": _NUM, "norm_scope": {"enum": ["full_state", "velocity_heading"]}},
            required=["sigma"],
        ),
        "wingman_init": _STATE,
        # absolute state, or separations relative to the wingman's initial pose
        "leader_init": {"oneOf": [_STATE, _RELATIVE_STATE]},
        "leader_command_schedule": {
            "type": "array",
            "minItems": 1,
            "items": _obj({"time": _NUM, "speed_cmd": _NUM, "heading_cmd": _NUM}),
        },
    },
    required=[
        "duration", "dt", "formation", "leader_time_constants", "wingman_time_constants",
        "gains_x", "gains_y", "trigger", "wingman_init", "leader_init",
        "leader_command_schedule",
    ],
)

BUNDLED = ("paper_example",)


def bundled_config_path(name: str) -> Path:
    return Path(str(resources.files("mbet_formation") / "configs" / f"{name}.json"))


def resolve_config_path(path: str | Path) -> Path:
    """A filesystem path, or the name of a bundled config such as ``paper_example``."""
    p = Path(path)
    if not p.exists() and str(path) in BUNDLED:
        return bundled_config_path(str(path))
    return p


def _key_of(err: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in err.absolute_path)
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        return ".".join(filter(None, [path, extra[0] if extra else ""]))
    if err.validator == "required":
        missing = err.message.split("'")[1] if "'" in err.message else ""
        return ".".join(filter(None, [path, missing]))
    return path or "<root>"


def validate(doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        if e.validator == "oneOf" and isinstance(e.instance, dict):
            raise ConfigError(
                _key_of(e),
                "expected either {pos_x, pos_y, speed, heading} or {lon_sep, lat_sep, speed, heading}",
            )
        raise ConfigError(_key_of(e), e.message)


def scenario_from_dict(doc: dict, sigma: float | None = None) -> Scenario:
    """Validate ``doc`` and build a ``Scenario``; ``sigma`` overrides ``trigger.sigma``."""
    validate(doc)

    def build(key: str, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None

    spec = build("formation", FormationSpec, **doc["formation"])
    tc_l = build("leader_time_constants", AutopilotTimeConstants, **doc["leader_time_constants"])
    tc_w = build("wingman_time_constants", AutopilotTimeConstants, **doc["wingman_time_constants"])
    trig = dict(doc["trigger"])
    if sigma is not None:
        trig["sigma"] = sigma
    trigger = build("trigger.sigma", TriggerConfig, **trig)
    wingman = AircraftState(**doc["wingman_init"])
    li = doc["leader_init"]
    if "lon_sep" in li:
        px, py = leader_position_for(wingman, li["lon_sep"], li["lat_sep"])
        leader = AircraftState(px, py, li["speed"], li["heading"])
    else:
        leader = AircraftState(**li)
    schedule = tuple(
        (float(e["time"]), CommandPair(e["speed_cmd"], e["heading_cmd"]))
        for e in doc["leader_command_schedule"]
    )
    if doc["duration"] <= 0:
        raise ConfigError("duration", f"must be positive, got {doc['duration']}")
    if not 0 < doc["dt"] <= doc["duration"]:
        raise ConfigError("dt", f"must satisfy 0 < dt <= duration, got {doc['dt']}")
    return build(
        "leader_command_schedule",
        Scenario,
        duration=float(doc["duration"]),
        dt=float(doc["dt"]),
        spec=spec,
        tc_leader=tc_l,
        tc_wingman=tc_w,
        gains_x=XChannelGains(**doc["gains_x"]),
        gains_y=YChannelGains(**doc["gains_y"]),
        trigger=trigger,
        leader_init=leader,
        wingman_init=wingman,
        leader_command_schedule=schedule,
    )


def load_config(path: str | Path) -> dict:
    p = resolve_config_path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None


def load_scenario(path: str | Path, sigma: float | None = None) -> Scenario:
    return scenario_from_dict(load_config(path), sigma=sigma)


def example_scenario(**overrides) -> Scenario:
    """The bundled example scenario, with top-level keys replaced by ``overrides``."""
    doc = load_config(bundled_config_path("paper_example"))
    doc.update(overrides)
    return scenario_from_dict(doc)
