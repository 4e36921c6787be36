"""In-process rig: the server core, the emulated robot (comms + motion
controllers) and the world simulation, wired through real protocol bytes
and advanced tick by tick on one clock.

Scenario runs drive this rig on a virtual clock, which makes every run
bit-reproducible; live mode drives the same parts from a wall-clock ticker.
Per tick: the device consumes last tick's server bytes and its next due mic
frame, the server consumes the device's bytes and runs its dispatcher, the
motion controller polls the pin bus, and the world integrates one dt.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from typing import Optional

from voicebot.device import (
    Action,
    CommsState,
    DRIVE_BRAKE,
    MotionState,
    PinBus,
    apply_binary_command,
    comms_step,
    motion_step,
)
from voicebot.protocol import FrameReader, Frame, Hello, DeviceKind, encode_frame
from voicebot.audio.pcm import FRAME_SAMPLES
from voicebot.server.core import ServerCore, DEFAULT_TICK_MS
from voicebot.server.schema import VoiceSchema
from voicebot.server.trace import Trace
from voicebot.sim.physics import IrSensorConfig, RobotBody
from voicebot.sim.simulation import Simulation
from voicebot.sim.world import WorldModel

SAMPLES_PER_MS = 8  # 8000 Hz

DEFAULT_ROBOT_SERIAL = 7


@dataclass
class RobotTick:
    outbound: list[Frame] = field(default_factory=list)
    pins_changed: bool = False
    brake_started: bool = False


class RobotHost:
    """The whole robot: comms and motion controllers plus its world,
    advanced one tick at a time. Transport-agnostic; the caller moves the
    frames."""

    def __init__(self, world: WorldModel, tick_ms: int = DEFAULT_TICK_MS,
                 body: RobotBody = RobotBody(),
                 ir_config: IrSensorConfig = IrSensorConfig(),
                 serial: int = DEFAULT_ROBOT_SERIAL):
        self.serial = serial
        self.tick_ms = tick_ms
        self.comms = CommsState()
        self.motion = MotionState()
        self.bus = PinBus()
        self.sim = Simulation(world, body, ir_config)
        self.mic_pending = array("h")
        self._mic_buffer = array("h")
        self.speaker = array("h")
        self.min_body_clearance = float("inf")
        self._was_braking = False

    def hello(self) -> Hello:
        return Hello(DeviceKind.MIXED, self.serial)

    def speak(self, samples) -> None:
        """Queue samples on the robot's microphone."""
        self.mic_pending.extend(samples)

    def _next_mic_frame(self) -> Optional[array]:
        need = self.tick_ms * SAMPLES_PER_MS
        if len(self.mic_pending) >= need:
            chunk = self.mic_pending[:need]
            del self.mic_pending[:need]
        else:
            chunk = array("h", self.mic_pending)
            del self.mic_pending[:]
            chunk.extend([0] * (need - len(chunk)))
        self._mic_buffer.extend(chunk)
        if len(self._mic_buffer) >= FRAME_SAMPLES:
            frame = self._mic_buffer[:FRAME_SAMPLES]
            del self._mic_buffer[:FRAME_SAMPLES]
            return frame
        return None

    def step(self, inbound: list[Frame], now_ms: int) -> RobotTick:
        dt = self.tick_ms / 1000.0
        result = comms_step(self.comms, inbound, self._next_mic_frame(), now_ms)
        self.comms = result.state
        old_bus = self.bus
        for pin, level in result.pin_writes:
            self.bus = apply_binary_command(self.bus, pin, level)
        self.speaker.extend(result.speaker)

        self.motion, commands = motion_step(self.motion, self.bus, self.sim.ir, dt)
        self.sim.step(commands, dt)
        self.min_body_clearance = min(self.min_body_clearance,
                                      self.sim.body_clearance())

        braking = (self.motion.action == Action.FORWARD
                   and commands.left == DRIVE_BRAKE)
        tick = RobotTick(outbound=result.outbound,
                         pins_changed=self.bus != old_bus,
                         brake_started=braking and not self._was_braking)
        self._was_braking = braking
        return tick

    def pose_event_fields(self) -> dict:
        pose = self.sim.pose
        return {"x": round(pose.x, 6), "y": round(pose.y, 6),
                "theta": round(pose.theta, 6),
                "aperture": round(self.sim.gripper.aperture, 6),
                "held": self.sim.gripper.held,
                "ir": self.sim.ir.obstacle}

    def pinbus_event_fields(self) -> dict:
        return {"pins": {str(p): l for p, l in self.bus.as_dict().items()}}


class Rig:
    """Server + robot + world in one process, joined by encoded bytes."""

    def __init__(self, world: WorldModel, schema: VoiceSchema, clock,
                 trace: Optional[Trace] = None, tick_ms: int = DEFAULT_TICK_MS,
                 robot_serial: int = DEFAULT_ROBOT_SERIAL,
                 body: RobotBody = RobotBody(),
                 ir_config: IrSensorConfig = IrSensorConfig()):
        self.clock = clock
        self.tick_ms = tick_ms
        self.trace = trace if trace is not None else Trace(clock)
        self.core = ServerCore(schema, clock, self.trace, tick_ms)
        self.host = RobotHost(world, tick_ms, body, ir_config, robot_serial)
        self.robot_serial = robot_serial

        self._dev_reader = FrameReader()  # decodes server -> device bytes
        self._srv_reader = FrameReader()  # decodes device -> server bytes
        self._to_device = bytearray()
        self._to_server = bytearray()

        self._tick_count = 0
        self._pose_every = max(1, 80 // tick_ms)  # 12.5 Hz pose feed at 10 ms ticks

        # the robot introduces itself over the wire like any real device
        self._to_server += encode_frame(self.host.hello())

    # convenience views used all over the tests
    @property
    def sim(self) -> Simulation:
        return self.host.sim

    @property
    def bus(self) -> PinBus:
        return self.host.bus

    @property
    def speaker(self) -> array:
        return self.host.speaker

    @property
    def min_body_clearance(self) -> float:
        return self.host.min_body_clearance

    def speak(self, samples) -> None:
        self.host.speak(samples)

    def submit_text(self, text: str) -> None:
        """Operator text entry via the console pseudo-device."""
        self.core.submit_text(self.core.console.serial, text)

    def step(self) -> None:
        now = self.clock.now_ms

        # Robot half: consume last tick's server bytes, move one tick.
        inbound = self._dev_reader.feed(bytes(self._to_device))
        self._to_device.clear()
        tick = self.host.step(inbound, now)
        for frame in tick.outbound:
            self._to_server += encode_frame(frame)

        # Server half: register/handle frames, run the dispatcher, reply.
        for frame in self._srv_reader.feed(bytes(self._to_server)):
            if isinstance(frame, Hello):
                self.core.connect(frame)
            else:
                self.core.handle_frame(self.robot_serial, frame)
        self._to_server.clear()
        self.core.tick(now)
        session = self.core.registry.get(self.robot_serial)
        if session is not None:
            for frame in session.take_outbound():
                self._to_device += encode_frame(frame)
        self.core.console.take_outbound()  # ops events already carry these

        self._emit_telemetry(tick)
        self._tick_count += 1
        self.clock.advance(self.tick_ms)

    def _emit_telemetry(self, tick: RobotTick) -> None:
        if tick.pins_changed:
            self.trace.emit("pinbus", **self.host.pinbus_event_fields())
        if tick.brake_started:
            self.trace.emit("brake", reason="ir_obstacle",
                            distance=self.host.sim.ir.distance)
        if self._tick_count % self._pose_every == 0:
            self.trace.emit("pose", **self.host.pose_event_fields())

    def run_for(self, duration_ms: int) -> None:
        end = self.clock.now_ms + duration_ms
        while self.clock.now_ms < end:
            self.step()
