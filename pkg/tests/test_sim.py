"""Physics: H-bridge truth table, motor curve, kinematics against an RK4
oracle, IR cone geometry, gripper, contact and determinism."""

import json
import math
import random

import numpy as np
import pytest

from voicebot.device import (
    DRIVE_BRAKE,
    DRIVE_COAST,
    DRIVE_FORWARD,
    DRIVE_REVERSE,
    HBridgeInput,
    MotorCommands,
)
from voicebot.sim import (
    Disc,
    Drive,
    GripperState,
    IrSensorConfig,
    Pose,
    RobotBody,
    Simulation,
    WorldModel,
    gripper_step,
    h_bridge,
    integrate_pose,
    ir_sense,
    motor_speed,
    normalize_angle,
)
from voicebot.sim.world import load_world, world_from_json


# -- h-bridge ---------------------------------------------------------------

@pytest.mark.parametrize("en,in1,in2,expected", [
    (1, 1, 0, Drive.FORWARD),
    (1, 0, 1, Drive.REVERSE),
    (1, 0, 0, Drive.BRAKE),
    (1, 1, 1, Drive.BRAKE),
    (0, 1, 0, Drive.COAST),
    (0, 0, 0, Drive.COAST),
    (0, 1, 1, Drive.COAST),
])
def test_h_bridge_truth_table(en, in1, in2, expected):
    assert h_bridge(en, in1, in2) == expected


# -- motor -----------------------------------------------------------------------

def test_motor_rated_speed():
    assert abs(motor_speed(Drive.FORWARD, 12.0) - 31.416) < 0.001
    assert motor_speed(Drive.FORWARD, 12.0) == pytest.approx(10 * math.pi)


def test_motor_dead_zone():
    assert motor_speed(Drive.FORWARD, 3.0) == 0.0
    assert motor_speed(Drive.FORWARD, 3.9) == 0.0
    assert motor_speed(Drive.FORWARD, 4.0) > 0.0


def test_motor_linear_scaling():
    assert abs(motor_speed(Drive.FORWARD, 9.0) - 23.562) < 0.001


def test_motor_direction_and_stops():
    assert motor_speed(Drive.REVERSE, 9.0) == -motor_speed(Drive.FORWARD, 9.0)
    assert motor_speed(Drive.BRAKE, 12.0) == 0.0
    assert motor_speed(Drive.COAST, 12.0) == 0.0


# -- kinematics ---------------------------------------------------------------------

def test_straight_line():
    pose = integrate_pose(Pose(0, 0, 0), 0.1, 0.1, 0.12, 1.0)
    assert pose.x == pytest.approx(0.1)
    assert pose.y == 0.0
    assert pose.theta == 0.0


def test_spin_in_place():
    pose = integrate_pose(Pose(1, 2, 0.5), -0.06, 0.06, 0.12, 1.0)
    assert pose.x == pytest.approx(1.0)
    assert pose.y == pytest.approx(2.0)
    assert pose.theta == pytest.approx(normalize_angle(0.5 + 0.12 / 0.12))


def test_equal_speeds_hold_theta_exactly():
    pose = Pose(0, 0, 0.7345)
    for _ in range(1000):
        pose = integrate_pose(pose, 0.2, 0.2, 0.12, 0.01)
    assert pose.theta == 0.7345  # bit-exact


def rk4_oracle(pose, v_l, v_r, wheelbase, dt, substep=1e-5):
    """Independent RK4 integration of the differential-drive ODE."""
    v = 0.5 * (v_l + v_r)
    omega = (v_r - v_l) / wheelbase
    n = max(1, int(round(dt / substep)))
    h = dt / n
    x, y, theta = pose.x, pose.y, pose.theta

    def deriv(th):
        return v * math.cos(th), v * math.sin(th), omega

    for _ in range(n):
        k1 = deriv(theta)
        k2 = deriv(theta + 0.5 * h * k1[2])
        k3 = deriv(theta + 0.5 * h * k2[2])
        k4 = deriv(theta + h * k3[2])
        x += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        theta += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return x, y, theta


def test_arc_matches_rk4_sample():
    pose = Pose(0, 0, 0)
    got = integrate_pose(pose, 0.05, 0.10, 0.12, 1.0)
    ex, ey, eth = rk4_oracle(pose, 0.05, 0.10, 0.12, 1.0, substep=1e-4)
    scale = max(1.0, abs(ex), abs(ey))
    assert abs(got.x - ex) / scale < 1e-6
    assert abs(got.y - ey) / scale < 1e-6
    assert abs(got.theta - normalize_angle(eth)) < 1e-6


def test_theta_always_normalized():
    rnd = random.Random(8)
    pose = Pose()
    for _ in range(500):
        pose = integrate_pose(pose, rnd.uniform(-0.5, 0.5),
                              rnd.uniform(-0.5, 0.5), 0.12,
                              rnd.uniform(0.001, 0.5))
        assert -math.pi < pose.theta <= math.pi


def test_normalize_angle_range_and_identity():
    assert normalize_angle(math.pi) == math.pi
    assert normalize_angle(-math.pi) == math.pi
    assert normalize_angle(3 * math.pi) == pytest.approx(math.pi)
    assert normalize_angle(0.25) == 0.25


# -- IR cone -----------------------------------------------------------------------

BODY = RobotBody()
IR = IrSensorConfig()


def world_with_obstacle(x, y, r=0.0):
    return WorldModel(obstacles=[Disc(x, y, r)])


def test_ir_dead_ahead():
    # apex is at the body front (0.09, 0); obstacle 0.2 m further out
    world = world_with_obstacle(0.29, 0.0)
    reading = ir_sense(world, Pose(0, 0, 0), IR, BODY)
    assert reading.obstacle
    assert reading.distance == pytest.approx(0.2)


def test_ir_ignores_behind():
    world = world_with_obstacle(-0.3, 0.0)
    assert not ir_sense(world, Pose(0, 0, 0), IR, BODY).obstacle


def test_ir_out_of_range():
    world = world_with_obstacle(0.09 + 0.31, 0.0)
    assert not ir_sense(world, Pose(0, 0, 0), IR, BODY).obstacle


def test_ir_cone_boundary_29_vs_31_degrees():
    for deg, expected in [(29, True), (31, False)]:
        ang = math.radians(deg)
        world = world_with_obstacle(0.09 + 0.2 * math.cos(ang),
                                    0.2 * math.sin(ang))
        assert ir_sense(world, Pose(0, 0, 0), IR, BODY).obstacle is expected, deg


def test_ir_excludes_held_object():
    world = WorldModel(objects={"box": Disc(0.2, 0.0, 0.02)})
    assert ir_sense(world, Pose(0, 0, 0), IR, BODY).obstacle
    assert not ir_sense(world, Pose(0, 0, 0), IR, BODY, held_object="box").obstacle


# -- gripper -----------------------------------------------------------------------

def test_gripper_close_and_grab():
    world = WorldModel(objects={"box": Disc(0.10, 0.0, 0.02)})
    state = gripper_step(GripperState(1.0, None), Drive.REVERSE, 0.35,
                         world, Pose(0, 0, 0), BODY)
    assert state.aperture == pytest.approx(0.3)
    assert state.held == "box"


def test_gripper_needs_object_in_reach():
    world = WorldModel(objects={"box": Disc(0.30, 0.0, 0.02)})
    state = gripper_step(GripperState(1.0, None), Drive.REVERSE, 0.35,
                         world, Pose(0, 0, 0), BODY)
    assert state.held is None


def test_gripper_release_at_open():
    world = WorldModel(objects={"box": Disc(0.09, 0.0, 0.02)})
    state = GripperState(0.0, "box")
    state = gripper_step(state, Drive.FORWARD, 0.3, world, Pose(0, 0, 0), BODY)
    assert state.held == "box"  # aperture 0.6, below the release point
    state = gripper_step(state, Drive.FORWARD, 0.25, world, Pose(0, 0, 0), BODY)
    assert state.held is None
    assert state.aperture >= 0.7


def test_gripper_brake_holds():
    state = GripperState(0.55, None)
    assert gripper_step(state, Drive.BRAKE, 1.0, WorldModel(), Pose(), BODY) == state
    assert gripper_step(state, Drive.COAST, 1.0, WorldModel(), Pose(), BODY) == state


# -- world stepping -----------------------------------------------------------------

FWD = MotorCommands(DRIVE_FORWARD, DRIVE_FORWARD, DRIVE_COAST)


def test_step_advance_per_tick():
    sim = Simulation(WorldModel())
    sim.step(FWD, 0.01)
    # 23.562 rad/s * 0.03 m * 0.01 s
    assert sim.pose.x == pytest.approx(0.0070686, abs=1e-6)
    assert sim.pose.y == 0.0


def test_step_no_drive_only_time():
    sim = Simulation(WorldModel(objects={"box": Disc(1, 1, 0.02)}))
    sim.step(MotorCommands(), 0.01)
    assert sim.pose == Pose(0, 0, 0)
    assert sim.time_s == pytest.approx(0.01)


def test_robot_stops_at_wall_no_tunneling():
    world = WorldModel(obstacles=[Disc(0.3, 0.0, 0.1)])
    sim = Simulation(world)
    for _ in range(200):
        sim.step(FWD, 0.01)
        assert sim.body_clearance() >= -1e-9
    # parked at contact: distance center-to-center == r_obs + r_body
    d = math.hypot(sim.pose.x - 0.3, sim.pose.y)
    assert d == pytest.approx(0.1 + 0.09, abs=1e-9)


def test_held_object_tracks_gripper_point():
    world = WorldModel(objects={"box": Disc(0.09, 0.0, 0.02)})
    sim = Simulation(world)
    sim.gripper = GripperState(0.31, None)
    sim.step(MotorCommands(gripper=DRIVE_REVERSE), 0.01)
    assert sim.gripper.held == "box"
    for _ in range(50):
        sim.step(FWD, 0.01)
        gx, gy = sim.front_point()
        box = sim.world.objects["box"]
        assert math.hypot(box.x - gx, box.y - gy) == 0.0


def test_trajectories_bit_identical():
    def run():
        sim = Simulation(WorldModel(obstacles=[Disc(0.5, 0.1, 0.1)]))
        poses = []
        for i in range(300):
            cmds = FWD if i % 7 else MotorCommands(DRIVE_REVERSE, DRIVE_FORWARD,
                                                   DRIVE_COAST)
            sim.step(cmds, 0.01)
            poses.append((sim.pose.x, sim.pose.y, sim.pose.theta))
        return poses

    assert run() == run()


# -- world files --------------------------------------------------------------------

def test_world_file_round_trip(demo_dir):
    world = load_world(demo_dir / "world_relocate.json")
    assert "box" in world.objects
    assert "target" in world.drop_zones
    assert world.ir_config is not None
    assert world.ir_config.half_angle == pytest.approx(math.radians(8))


def test_world_rejects_duplicate_object_ids():
    doc = {"objects": [{"id": "a", "x": 0, "y": 0, "r": 1},
                       {"id": "a", "x": 1, "y": 1, "r": 1}]}
    with pytest.raises(Exception):
        world_from_json(json.dumps(doc))
