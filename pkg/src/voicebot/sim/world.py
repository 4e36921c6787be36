"""World files: circular obstacles, movable object discs, named drop zones
and the robot's starting pose, as JSON:

    {"obstacles": [{"x": 0.6, "y": 0.0, "r": 0.1}],
     "objects":   [{"id": "box", "x": 0.3, "y": 0.1, "r": 0.03}],
     "drop_zones":[{"name": "home", "x": 0.0, "y": 0.4, "r": 0.1}],
     "robot":     {"x": 0.0, "y": 0.0, "theta": 0.0}}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from voicebot.sim.physics import IrSensorConfig, Pose


class WorldError(Exception):
    pass


@dataclass
class Disc:
    x: float
    y: float
    r: float


@dataclass
class WorldModel:
    obstacles: list[Disc] = field(default_factory=list)
    objects: dict[str, Disc] = field(default_factory=dict)
    drop_zones: dict[str, Disc] = field(default_factory=dict)
    initial_pose: Pose = field(default_factory=Pose)
    # optional per-world sensor mounting, e.g. a narrow close-range cone
    # for pick-and-place tasks; None means the stock sensor
    ir_config: Optional[IrSensorConfig] = None

    def snapshot(self) -> dict:
        return {
            "obstacles": [{"x": d.x, "y": d.y, "r": d.r} for d in self.obstacles],
            "objects": [{"id": n, "x": d.x, "y": d.y, "r": d.r}
                        for n, d in self.objects.items()],
            "drop_zones": [{"name": n, "x": d.x, "y": d.y, "r": d.r}
                           for n, d in self.drop_zones.items()],
        }


def _disc(doc: dict, where: str) -> Disc:
    try:
        x = float(doc["x"])
        y = float(doc["y"])
        r = float(doc["r"])
    except (KeyError, TypeError, ValueError) as exc:
        raise WorldError(f"{where}: needs numeric x, y, r ({exc})") from None
    if r < 0:
        raise WorldError(f"{where}: radius must be >= 0")
    return Disc(x, y, r)


def world_from_json(document: str | bytes | dict) -> WorldModel:
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise WorldError(f"invalid JSON: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise WorldError("top level must be an object")

    world = WorldModel()
    for i, raw in enumerate(doc.get("obstacles", [])):
        world.obstacles.append(_disc(raw, f"obstacles[{i}]"))
    for i, raw in enumerate(doc.get("objects", [])):
        disc = _disc(raw, f"objects[{i}]")
        name = raw.get("id")
        if not isinstance(name, str) or not name:
            raise WorldError(f"objects[{i}]: needs a non-empty string id")
        if name in world.objects:
            raise WorldError(f"objects[{i}]: duplicate id {name!r}")
        world.objects[name] = disc
    for i, raw in enumerate(doc.get("drop_zones", [])):
        disc = _disc(raw, f"drop_zones[{i}]")
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            raise WorldError(f"drop_zones[{i}]: needs a non-empty string name")
        if name in world.drop_zones:
            raise WorldError(f"drop_zones[{i}]: duplicate name {name!r}")
        world.drop_zones[name] = disc
    robot = doc.get("robot", {})
    if not isinstance(robot, dict):
        raise WorldError("robot must be an object")
    world.initial_pose = Pose(float(robot.get("x", 0.0)),
                              float(robot.get("y", 0.0)),
                              float(robot.get("theta", 0.0)))
    ir = doc.get("ir")
    if ir is not None:
        if not isinstance(ir, dict):
            raise WorldError("ir must be an object")
        try:
            world.ir_config = IrSensorConfig(
                range=float(ir.get("range_m", IrSensorConfig.range)),
                half_angle=math.radians(float(ir["half_angle_deg"]))
                if "half_angle_deg" in ir else IrSensorConfig.half_angle)
        except (TypeError, ValueError) as exc:
            raise WorldError(f"ir: {exc}") from None
    return world


def load_world(path) -> WorldModel:
    with open(path, "r", encoding="utf-8") as fh:
        return world_from_json(fh.read())
