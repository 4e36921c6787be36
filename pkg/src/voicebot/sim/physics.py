"""Physical models: L293D channel truth table, the 300-RPM-at-12V gear
motor with its 4 V dead zone, exact differential-drive pose integration,
the IR sensing cone, and the gripper jaw."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from voicebot.device import HBridgeInput, IrReading

MOTOR_RATED_RPM = 300.0
MOTOR_RATED_V = 12.0
MOTOR_MIN_V = 4.0
GRIPPER_SLEW_PER_S = 2.0
GRIP_REACH_M = 0.05
GRAB_APERTURE = 0.3
RELEASE_APERTURE = 0.7
# slew arithmetic like 1.0 - 2.0*0.35 must count as reaching 0.3 exactly
_APERTURE_EPS = 1e-9


class Drive(Enum):
    FORWARD = "forward"
    REVERSE = "reverse"
    BRAKE = "brake"
    COAST = "coast"


def h_bridge(en: int, in1: int, in2: int) -> Drive:
    """L293D channel truth table: enable low coasts; with enable high the
    input pair picks direction, and matching inputs short-brake."""
    if en == 0:
        return Drive.COAST
    if in1 == 1 and in2 == 0:
        return Drive.FORWARD
    if in1 == 0 and in2 == 1:
        return Drive.REVERSE
    return Drive.BRAKE


def h_bridge_drive(cmd: HBridgeInput) -> Drive:
    return h_bridge(cmd.en, cmd.in1, cmd.in2)


def motor_speed(drive: Drive, supply_voltage: float) -> float:
    """Wheel shaft speed in rad/s. The gear motor runs from 4 V up, scaling
    linearly to 300 RPM at 12 V; below 4 V it stalls. First-order model:
    speed follows drive instantly, brake and coast both read 0."""
    if supply_voltage < MOTOR_MIN_V:
        return 0.0
    magnitude = (MOTOR_RATED_RPM * 2.0 * math.pi / 60.0) * (supply_voltage / MOTOR_RATED_V)
    if drive == Drive.FORWARD:
        return magnitude
    if drive == Drive.REVERSE:
        return -magnitude
    return 0.0


def normalize_angle(theta: float) -> float:
    """Map to (-pi, pi]; exact identity for angles already in range."""
    t = math.remainder(theta, math.tau)
    if t <= -math.pi:
        t += math.tau
    return t


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0


def integrate_pose(pose: Pose, v_left: float, v_right: float,
                   wheelbase: float, dt: float) -> Pose:
    """Exact arc integration of differential drive. Equal wheel speeds give
    a mathematically straight line (heading untouched); otherwise the body
    rotates about the instantaneous center of curvature. The chord form
    v*dt*sinc(dtheta/2) is the closed-form arc displacement and stays
    numerically stable as the turn rate approaches zero."""
    v = 0.5 * (v_left + v_right)
    omega = (v_right - v_left) / wheelbase
    dtheta = omega * dt
    if dtheta == 0.0:
        dx = v * dt * math.cos(pose.theta)
        dy = v * dt * math.sin(pose.theta)
    else:
        half = 0.5 * dtheta
        chord = v * dt * (math.sin(half) / half)
        mid = pose.theta + half
        dx = chord * math.cos(mid)
        dy = chord * math.sin(mid)
    return Pose(pose.x + dx, pose.y + dy, normalize_angle(pose.theta + dtheta))


@dataclass(frozen=True)
class RobotBody:
    wheelbase: float = 0.12
    wheel_radius: float = 0.03
    body_radius: float = 0.09
    supply_voltage: float = 9.0  # three 9 V batteries feed the drive rail

    def __post_init__(self):
        for name in ("wheelbase", "wheel_radius", "body_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class IrSensorConfig:
    range: float = 0.30
    half_angle: float = math.pi / 6  # the 0-60 degree lobe, read as +/-30

    def __post_init__(self):
        if not 0 < self.half_angle <= math.pi / 2:
            raise ValueError("half_angle must be in (0, pi/2]")


def front_point(pose: Pose, body: RobotBody) -> tuple[float, float]:
    return (pose.x + body.body_radius * math.cos(pose.theta),
            pose.y + body.body_radius * math.sin(pose.theta))


def _disc_in_cone(ax: float, ay: float, heading: float, cfg: IrSensorConfig,
                  cx: float, cy: float, cr: float) -> Optional[float]:
    """Distance to a disc if it intersects the sensing sector, else None."""
    dx = cx - ax
    dy = cy - ay
    dist = math.hypot(dx, dy)
    if dist <= cr:
        return 0.0
    clearance = dist - cr
    if clearance > cfg.range:
        return None
    bearing = normalize_angle(math.atan2(dy, dx) - heading)
    if abs(bearing) <= cfg.half_angle:
        return clearance
    # Center is outside the angular span: the disc can still clip a cone
    # edge. Check the two edge segments of length `range` from the apex.
    for edge in (heading - cfg.half_angle, heading + cfg.half_angle):
        ex = math.cos(edge)
        ey = math.sin(edge)
        t = max(0.0, min(cfg.range, dx * ex + dy * ey))
        px = ax + t * ex
        py = ay + t * ey
        if math.hypot(cx - px, cy - py) <= cr:
            return clearance
    return None


def ir_sense(world, pose: Pose, cfg: IrSensorConfig, body: RobotBody,
             held_object: Optional[str] = None) -> IrReading:
    """Boolean obstacle gate (plus nearest distance for traces): true when
    any obstacle or non-held object intersects the forward sensing cone
    anchored at the body front."""
    ax, ay = front_point(pose, body)
    nearest: Optional[float] = None
    for disc in world.obstacles:
        d = _disc_in_cone(ax, ay, pose.theta, cfg, disc.x, disc.y, disc.r)
        if d is not None and (nearest is None or d < nearest):
            nearest = d
    for name, disc in world.objects.items():
        if name == held_object:
            continue
        d = _disc_in_cone(ax, ay, pose.theta, cfg, disc.x, disc.y, disc.r)
        if d is not None and (nearest is None or d < nearest):
            nearest = d
    return IrReading(nearest is not None, nearest)


@dataclass(frozen=True)
class GripperState:
    aperture: float = 1.0  # 0 closed .. 1 open
    held: Optional[str] = None


def gripper_step(state: GripperState, drive: Drive, dt: float, world,
                 pose: Pose, body: RobotBody) -> GripperState:
    """Slew the jaw at 2.0/s (Forward opens, Reverse closes, Brake/Coast
    hold). Closing past 0.3 grabs the nearest object within 5 cm of the
    gripper point; opening past 0.7 releases in place."""
    aperture = state.aperture
    if drive == Drive.FORWARD:
        aperture = min(1.0, aperture + GRIPPER_SLEW_PER_S * dt)
    elif drive == Drive.REVERSE:
        aperture = max(0.0, aperture - GRIPPER_SLEW_PER_S * dt)
    held = state.held
    if held is None and state.aperture > GRAB_APERTURE \
            and aperture <= GRAB_APERTURE + _APERTURE_EPS:
        gx, gy = front_point(pose, body)
        best = None
        best_d = GRIP_REACH_M
        for name, disc in world.objects.items():
            d = math.hypot(disc.x - gx, disc.y - gy)
            if d <= best_d:
                best = name
                best_d = d
        held = best
    elif held is not None and state.aperture < RELEASE_APERTURE \
            and aperture >= RELEASE_APERTURE - _APERTURE_EPS:
        held = None
    return GripperState(aperture, held)
