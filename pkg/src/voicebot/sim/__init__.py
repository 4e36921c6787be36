"""Deterministic 2D world: H-bridge/motor models, differential-drive
kinematics, IR cone sensing, gripper pick-and-place."""

from voicebot.sim.physics import (
    Drive,
    GripperState,
    IrSensorConfig,
    Pose,
    RobotBody,
    gripper_step,
    h_bridge,
    integrate_pose,
    ir_sense,
    motor_speed,
    normalize_angle,
)
from voicebot.sim.world import Disc, WorldModel, load_world
from voicebot.sim.simulation import Simulation

__all__ = [
    "Drive", "GripperState", "IrSensorConfig", "Pose", "RobotBody",
    "gripper_step", "h_bridge", "integrate_pose", "ir_sense", "motor_speed",
    "normalize_angle", "Disc", "WorldModel", "load_world", "Simulation",
]
