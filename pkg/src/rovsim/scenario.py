"""Scenario definitions: parameter files, command scripts, built-ins.

A scenario bundles everything a deterministic run needs: vehicle params,
noise config, turbidity field, link impairments, initial state, duration,
seed, and a timed script of wire commands. The JSON file format mirrors
the dataclass field names in SI units; omitted keys take defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import telemetry
from .dynamics import VehicleParams, VehicleState
from .estimation import DEFAULT_ALPHA
from .link import LinkConfig
from .sensors import ConstantField, NoiseConfig, turbidity_field_from_dict


class ScenarioError(ValueError):
    """Scenario file or definition is invalid."""


@dataclass(frozen=True)
class StepCheck:
    """Declares that a reference step happens at step_time on a channel."""

    channel: str  # "yaw" or "depth"
    step_time: float


@dataclass(frozen=True)
class Scenario:
    name: str
    params: VehicleParams = field(default_factory=VehicleParams)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    turbidity_field: object = field(default_factory=ConstantField)
    duration: float = 20.0
    seed: int = 0
    script: tuple[tuple[float, telemetry.CommandMessage], ...] = ()
    link: LinkConfig = field(default_factory=LinkConfig)
    initial: VehicleState = field(default_factory=VehicleState)
    alpha: float = DEFAULT_ALPHA
    step_checks: tuple[StepCheck, ...] = ()

    def __post_init__(self) -> None:
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ScenarioError(f"duration must be > 0, got {self.duration}")
        last_t = 0.0
        for t, _msg in self.script:
            if t < last_t:
                raise ScenarioError("script times must be non-decreasing")
            if t > self.duration:
                raise ScenarioError(f"script time {t} exceeds duration {self.duration}")
            last_t = t

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)


def make_script(entries: list[tuple[float, dict]]) -> tuple[tuple[float, telemetry.CommandMessage], ...]:
    """Turn (time, JSON-command) pairs into sequenced wire messages."""
    script = []
    for seq, (t, obj) in enumerate(entries):
        script.append((float(t), telemetry.command_from_json(obj, seq=seq)))
    return tuple(script)


def scenario_from_dict(data: dict, name: str = "scenario") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must contain a JSON object")
    known = {
        "name", "params", "noise", "field", "duration", "seed",
        "script", "link", "initial", "alpha", "steps",
    }
    unknown = set(data) - known
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    try:
        params = VehicleParams.from_dict(data.get("params", {}))
        noise = NoiseConfig.from_dict(data.get("noise", {}))
        turb = turbidity_field_from_dict(data.get("field", {"type": "constant"}))
        link = LinkConfig.from_dict(data.get("link", {}))
        initial = VehicleState(**{k: float(v) for k, v in data.get("initial", {}).items()})
        entries = []
        for item in data.get("script", []):
            if not isinstance(item, dict) or "t" not in item:
                raise ScenarioError("script entries must be objects with a 't' key")
            obj = {k: v for k, v in item.items() if k != "t"}
            entries.append((float(item["t"]), obj))
        steps = tuple(
            StepCheck(channel=str(s["channel"]), step_time=float(s["t"]))
            for s in data.get("steps", [])
        )
        return Scenario(
            name=str(data.get("name", name)),
            params=params,
            noise=noise,
            turbidity_field=turb,
            duration=float(data.get("duration", 20.0)),
            seed=int(data.get("seed", 0)),
            script=make_script(entries),
            link=link,
            initial=initial,
            alpha=float(data.get("alpha", DEFAULT_ALPHA)),
            step_checks=steps,
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid scenario: {exc}") from exc


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(data, name=path.stem)


# --------------------------------------------------------------------------
# Built-in scenarios

_CLOSED_LOOP = {"kind": "set_mode", "mode": "closed_loop"}


def _openloop_yaw() -> Scenario:
    # Differential burn then release; the pool test this mirrors recorded
    # the unforced yaw-rate decay after input removal.
    return Scenario(
        name="openloop_yaw",
        duration=20.0,
        seed=101,
        script=make_script([
            (0.0, {"kind": "manual_duties", "duties": {"left": 0.4, "right": -0.4, "vertical": 0.0}}),
            (5.0, {"kind": "manual_duties", "duties": {"left": 0.0, "right": 0.0, "vertical": 0.0}}),
        ]),
    )


def _yaw_step_30deg() -> Scenario:
    return Scenario(
        name="yaw_step_30deg",
        duration=25.0,
        seed=102,
        script=make_script([
            (0.0, _CLOSED_LOOP),
            (1.0, {"kind": "set_setpoints", "yaw_ref": math.radians(30.0), "depth_ref": 0.0, "surge_duty": 0.0}),
        ]),
        step_checks=(StepCheck(channel="yaw", step_time=1.0),),
    )


def _depth_step_1m() -> Scenario:
    return Scenario(
        name="depth_step_1m",
        duration=30.0,
        seed=103,
        script=make_script([
            (0.0, _CLOSED_LOOP),
            (1.0, {"kind": "set_setpoints", "yaw_ref": 0.0, "depth_ref": 1.0, "surge_duty": 0.0}),
        ]),
        step_checks=(StepCheck(channel="depth", step_time=1.0),),
    )


def _resurface_drift() -> Scenario:
    return Scenario(
        name="resurface_drift",
        duration=25.0,
        seed=104,
        initial=VehicleState(depth=2.0),
    )


def _turbidity_survey() -> Scenario:
    # Vertical transect through a depth gradient; turbidity should track it.
    from .sensors import LinearDepthField

    return Scenario(
        name="turbidity_survey",
        duration=60.0,
        seed=105,
        turbidity_field=LinearDepthField(surface_ntu=2.0, ntu_per_meter=40.0),
        script=make_script([
            (0.0, _CLOSED_LOOP),
            (1.0, {"kind": "set_setpoints", "yaw_ref": 0.0, "depth_ref": 0.5, "surge_duty": 0.0}),
            (20.0, {"kind": "set_setpoints", "yaw_ref": 0.0, "depth_ref": 1.0, "surge_duty": 0.0}),
            (40.0, {"kind": "set_setpoints", "yaw_ref": 0.0, "depth_ref": 1.5, "surge_duty": 0.0}),
        ]),
    )


def _link_impaired_yaw_step() -> Scenario:
    # Same maneuver as yaw_step_30deg over a lossy, laggy tether. The
    # ground station repeats the setpoint, as a pilot console would.
    step_cmd = {"kind": "set_setpoints", "yaw_ref": math.radians(30.0), "depth_ref": 0.0, "surge_duty": 0.0}
    entries: list[tuple[float, dict]] = [(0.0, _CLOSED_LOOP), (0.2, _CLOSED_LOOP), (0.4, _CLOSED_LOOP)]
    entries += [(1.0 + 0.2 * k, dict(step_cmd)) for k in range(5)]
    return Scenario(
        name="link_impaired_yaw_step",
        duration=25.0,
        seed=106,
        link=LinkConfig(latency_ms=60.0, drop_prob=0.1, corrupt_prob=0.0005),
        script=make_script(entries),
        step_checks=(StepCheck(channel="yaw", step_time=1.0),),
    )


BUILTIN_SCENARIOS = {
    "openloop_yaw": _openloop_yaw,
    "yaw_step_30deg": _yaw_step_30deg,
    "depth_step_1m": _depth_step_1m,
    "resurface_drift": _resurface_drift,
    "turbidity_survey": _turbidity_survey,
    "link_impaired_yaw_step": _link_impaired_yaw_step,
}


def get_scenario(name_or_path: str) -> Scenario:
    """Resolve a built-in name first, then fall back to a JSON file path."""
    factory = BUILTIN_SCENARIOS.get(name_or_path)
    if factory is not None:
        return factory()
    return load_scenario(name_or_path)
