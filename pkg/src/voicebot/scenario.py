"""Scripted scenarios: boot the whole rig on a virtual clock, feed timed
operator inputs, check the final world state, write a replayable trace.

Scenario file:

    {"world": "world.json",
     "schema": "schema.json",
     "steps": [
        {"at_ms": 0,    "input": {"type": "text", "text": "move forward"}},
        {"at_ms": 400,  "input": {"type": "audio", "wav": "cmd.wav"}},
        {"at_ms": 3000, "input": {"type": "wait"}}],
     "checks": [
        {"type": "robot_in_circle", "x": 0.4, "y": 0.0, "r": 0.1},
        {"type": "object_in_zone", "object": "box", "zone": "target"},
        {"type": "pin", "pin": 3, "level": 0},
        {"type": "front_clearance", "min": 0.0, "max": 0.3},
        {"type": "never_penetrated"}]}

Relative paths resolve against the scenario file. The run ends at the last
step's time; a trailing wait step is how a scenario asks for settling time.
Runs never sleep: time is virtual, so identical scenarios produce
byte-identical traces.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional

from voicebot.audio.pcm import AudioError, read_wav
from voicebot.clock import VirtualClock
from voicebot.harness import Rig
from voicebot.server.schema import SchemaError, load_schema_file
from voicebot.server.trace import MalformedTrace, Trace, read_trace
from voicebot.sim.physics import IrSensorConfig
from voicebot.sim.world import WorldError, load_world


class ConfigError(Exception):
    pass


@dataclass
class ScenarioStep:
    at_ms: int
    kind: str  # "text" | "audio" | "wait"
    text: Optional[str] = None
    wav: Optional[str] = None


@dataclass
class Scenario:
    world_path: str
    schema_path: str
    steps: list[ScenarioStep]
    checks: list[dict]
    tick_ms: int = 10


@dataclass
class ScenarioReport:
    passed: bool
    failures: list[str]
    events: list[dict]
    rig: Rig = field(repr=False, default=None)


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("scenario top level must be an object")

    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    for key in ("world", "schema"):
        if not isinstance(doc.get(key), str):
            raise ConfigError(f"scenario needs a {key!r} file path")

    steps = []
    last_at = -1
    for i, raw in enumerate(doc.get("steps", [])):
        where = f"steps[{i}]"
        if not isinstance(raw, dict) or not isinstance(raw.get("at_ms"), int):
            raise ConfigError(f"{where}: needs integer at_ms")
        at_ms = raw["at_ms"]
        if at_ms < last_at:
            raise ConfigError(f"{where}: steps must be sorted by at_ms")
        last_at = at_ms
        inp = raw.get("input")
        if not isinstance(inp, dict) or inp.get("type") not in ("text", "audio", "wait"):
            raise ConfigError(f"{where}: input.type must be text, audio or wait")
        kind = inp["type"]
        step = ScenarioStep(at_ms, kind)
        if kind == "text":
            if not isinstance(inp.get("text"), str) or not inp["text"]:
                raise ConfigError(f"{where}: text input needs non-empty text")
            step.text = inp["text"]
        elif kind == "audio":
            if not isinstance(inp.get("wav"), str):
                raise ConfigError(f"{where}: audio input needs a wav path")
            step.wav = resolve(inp["wav"])
            if not os.path.exists(step.wav):
                raise ConfigError(f"{where}: wav file {step.wav} does not exist")
        steps.append(step)

    checks = doc.get("checks", [])
    if not isinstance(checks, list):
        raise ConfigError("checks must be a list")
    for i, check in enumerate(checks):
        if not isinstance(check, dict) or "type" not in check:
            raise ConfigError(f"checks[{i}]: needs a type")

    return Scenario(resolve(doc["world"]), resolve(doc["schema"]),
                    steps, checks, int(doc.get("tick_ms", 10)))


def _validate_checks(scenario: Scenario, world) -> None:
    known = {"robot_in_circle", "object_in_zone", "pin", "front_clearance",
             "never_penetrated"}
    for i, check in enumerate(scenario.checks):
        kind = check["type"]
        if kind not in known:
            raise ConfigError(f"checks[{i}]: unknown type {kind!r}")
        if kind == "object_in_zone":
            if check.get("object") not in world.objects:
                raise ConfigError(f"checks[{i}]: unknown object "
                                  f"{check.get('object')!r}")
            if check.get("zone") not in world.drop_zones:
                raise ConfigError(f"checks[{i}]: unknown drop zone "
                                  f"{check.get('zone')!r}")
        if kind == "pin" and check.get("pin") not in range(2, 10):
            raise ConfigError(f"checks[{i}]: pin must be 2..9")


def _evaluate_checks(scenario: Scenario, rig: Rig) -> list[str]:
    failures = []
    for check in scenario.checks:
        kind = check["type"]
        if kind == "robot_in_circle":
            pose = rig.sim.pose
            d = math.hypot(pose.x - check["x"], pose.y - check["y"])
            if d > check["r"]:
                failures.append(f"robot at ({pose.x:.3f}, {pose.y:.3f}) is "
                                f"{d:.3f} m from ({check['x']}, {check['y']}), "
                                f"outside r={check['r']}")
        elif kind == "object_in_zone":
            obj = rig.sim.world.objects[check["object"]]
            zone = rig.sim.world.drop_zones[check["zone"]]
            d = math.hypot(obj.x - zone.x, obj.y - zone.y)
            if d > zone.r:
                failures.append(f"object {check['object']!r} center is "
                                f"{d:.3f} m from zone {check['zone']!r} "
                                f"(radius {zone.r})")
        elif kind == "pin":
            actual = rig.bus.level(check["pin"])
            if actual != check["level"]:
                failures.append(f"pin {check['pin']} is {actual}, "
                                f"expected {check['level']}")
        elif kind == "front_clearance":
            clearance = rig.sim.front_clearance()
            lo = check.get("min", 0.0)
            hi = check["max"]
            if not lo <= clearance <= hi:
                failures.append(f"front clearance {clearance:.4f} m outside "
                                f"[{lo}, {hi}]")
        elif kind == "never_penetrated":
            if rig.min_body_clearance < -1e-9:
                failures.append(f"body penetrated an obstacle by "
                                f"{-rig.min_body_clearance:.6f} m")
    return failures


def run_scenario(path, trace_path=None, tick_ms: Optional[int] = None) -> ScenarioReport:
    scenario = load_scenario(path)
    if tick_ms is not None:
        scenario.tick_ms = tick_ms
    try:
        world = load_world(scenario.world_path)
    except (OSError, WorldError) as exc:
        raise ConfigError(f"world: {exc}") from None
    try:
        schema = load_schema_file(scenario.schema_path)
    except (OSError, SchemaError) as exc:
        raise ConfigError(f"schema: {exc}") from None
    _validate_checks(scenario, world)

    clock = VirtualClock()
    trace = Trace(clock, trace_path)
    rig = Rig(world, schema, clock, trace, scenario.tick_ms,
              ir_config=world.ir_config or IrSensorConfig())

    duration = scenario.steps[-1].at_ms if scenario.steps else 0
    pending = list(scenario.steps)
    while True:
        now = clock.now_ms
        while pending and pending[0].at_ms <= now:
            step = pending.pop(0)
            if step.kind == "text":
                rig.submit_text(step.text)
            elif step.kind == "audio":
                try:
                    clip = read_wav(step.wav)
                except (OSError, AudioError) as exc:
                    raise ConfigError(f"audio step: {exc}") from None
                rig.speak(clip.samples)
        if now > duration:
            break
        rig.step()

    failures = _evaluate_checks(scenario, rig)
    trace.emit("scenario_end", passed=not failures, failures=len(failures))
    trace.close()
    return ScenarioReport(not failures, failures, trace.events, rig)


def replay_trace(path) -> str:
    """Render a trace as a fixed-width table; same trace, same text."""
    events = read_trace(path)
    lines = [f"{'t_ms':>8}  {'type':<18} detail",
             f"{'-' * 8}  {'-' * 18} {'-' * 40}"]
    for event in events:
        detail = " ".join(f"{k}={_fmt(v)}" for k, v in event.items()
                          if k not in ("t", "type"))
        lines.append(f"{event['t']:>8}  {event['type']:<18} {detail}")
    return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, dict):
        return "{" + ",".join(f"{k}:{v}" for k, v in value.items()) + "}"
    return str(value)
