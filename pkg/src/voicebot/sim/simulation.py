"""The world stepper: one 10 ms tick applies H-bridge decode, the motor
model, exact pose integration, obstacle contact, gripper and held-object
tracking, then refreshes the IR reading for the next motion poll.

Single-threaded and free of randomness: identical command sequences yield
bit-identical trajectories. Snapshots for the ops feed are plain copies
taken between ticks.
"""

from __future__ import annotations

import math

from voicebot.device import IrReading, MotorCommands
from voicebot.sim.physics import (
    GripperState,
    IrSensorConfig,
    Pose,
    RobotBody,
    front_point,
    gripper_step,
    h_bridge_drive,
    integrate_pose,
    ir_sense,
    motor_speed,
)
from voicebot.sim.world import WorldModel


class Simulation:
    def __init__(self, world: WorldModel, body: RobotBody = RobotBody(),
                 ir_config: IrSensorConfig = IrSensorConfig()):
        self.world = world
        self.body = body
        self.ir_config = ir_config
        self.pose = world.initial_pose
        self.gripper = GripperState()
        self.time_s = 0.0
        self.ir = ir_sense(world, self.pose, ir_config, body, None)

    def front_point(self) -> tuple[float, float]:
        return front_point(self.pose, self.body)

    def body_clearance(self) -> float:
        """Distance from the body circle to the nearest obstacle edge;
        negative means penetration."""
        best = math.inf
        for disc in self.world.obstacles:
            d = math.hypot(disc.x - self.pose.x, disc.y - self.pose.y)
            best = min(best, d - disc.r - self.body.body_radius)
        return best

    def front_clearance(self) -> float:
        fx, fy = self.front_point()
        best = math.inf
        for disc in self.world.obstacles:
            best = min(best, math.hypot(disc.x - fx, disc.y - fy) - disc.r)
        return best

    def _resolve_contacts(self, pose: Pose) -> Pose:
        # Circle pushback; two passes settle the rare two-obstacle corner.
        min_gap = self.body.body_radius
        x, y = pose.x, pose.y
        for _ in range(2):
            moved = False
            for disc in self.world.obstacles:
                dx = x - disc.x
                dy = y - disc.y
                d = math.hypot(dx, dy)
                limit = disc.r + min_gap
                if d < limit:
                    if d == 0.0:
                        return Pose(pose.x, pose.y, pose.theta)  # degenerate; stay put
                    x = disc.x + dx / d * limit
                    y = disc.y + dy / d * limit
                    moved = True
            if not moved:
                break
        return Pose(x, y, pose.theta)

    def step(self, commands: MotorCommands, dt: float) -> None:
        v_left = motor_speed(h_bridge_drive(commands.left),
                             self.body.supply_voltage) * self.body.wheel_radius
        v_right = motor_speed(h_bridge_drive(commands.right),
                              self.body.supply_voltage) * self.body.wheel_radius
        moved = integrate_pose(self.pose, v_left, v_right, self.body.wheelbase, dt)
        if v_left != 0.0 or v_right != 0.0:
            moved = self._resolve_contacts(moved)
        self.pose = moved

        self.gripper = gripper_step(self.gripper, h_bridge_drive(commands.gripper),
                                    dt, self.world, self.pose, self.body)
        if self.gripper.held is not None:
            gx, gy = self.front_point()
            disc = self.world.objects[self.gripper.held]
            disc.x = gx
            disc.y = gy

        self.ir = ir_sense(self.world, self.pose, self.ir_config, self.body,
                           self.gripper.held)
        self.time_s += dt
