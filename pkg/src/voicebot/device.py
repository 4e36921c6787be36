"""Firmware emulator for the robot's two controllers.

The comms controller talks to the server (captures mic audio while the
server reports Free, drains inbound data while Busy, turns binary commands
into pin writes and synthesized speech into speaker output). The motion
controller never sees the link: it polls the 8-line pin bus and drives the
motor H-bridges. The two communicate through PinBus alone, single-writer
per tick: comms writes, motion reads.

Both step functions are pure; all state is carried in the returned values.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from voicebot.audio.pcm import samples_from_bytes, samples_to_bytes
from voicebot.audio.vad import VadEvent, VadState, vad_step
from voicebot.protocol import (
    Audio,
    BinaryCommand,
    Frame,
    ServerState,
    StatusRequest,
    StatusResponse,
    SynthAudio,
)

MOVEMENT_PINS = (3, 4, 5, 6)
ALL_PINS = tuple(range(2, 10))
STATUS_POLL_MS = 500


class Action(Enum):
    IDLE = "idle"
    WAKE_UP = "wake_up"
    FORWARD = "forward"
    BACKWARD = "backward"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    GRIP_OPEN = "grip_open"
    GRIP_CLOSE = "grip_close"
    SHUTDOWN = "shutdown"


PIN_ACTIONS = {
    2: Action.WAKE_UP,
    3: Action.FORWARD,
    4: Action.BACKWARD,
    5: Action.TURN_LEFT,
    6: Action.TURN_RIGHT,
    7: Action.GRIP_OPEN,
    8: Action.GRIP_CLOSE,
    9: Action.SHUTDOWN,
}

# Shutdown preempts everything, wake-up next, then the motion pins in order.
PIN_PRIORITY = (9, 2, 3, 4, 5, 6, 7, 8)


def pin_to_action(pin: int) -> Action:
    return PIN_ACTIONS[pin]


@dataclass(frozen=True)
class PinBus:
    levels: tuple[int, ...] = (0,) * 8  # index 0 -> pin 2

    def level(self, pin: int) -> int:
        return self.levels[pin - 2]

    def as_dict(self) -> dict[int, int]:
        return {pin: self.level(pin) for pin in ALL_PINS}


def apply_binary_command(bus: PinBus, pin: int, level: int) -> PinBus:
    """Set one pin. Raising a movement pin drops its three siblings so at
    most one of pins 3..6 is ever high; raising the shutdown pin clears
    everything else."""
    levels = list(bus.levels)
    levels[pin - 2] = level
    if level == 1 and pin in MOVEMENT_PINS:
        for other in MOVEMENT_PINS:
            if other != pin:
                levels[other - 2] = 0
    if level == 1 and pin == 9:
        levels = [0] * 8
        levels[9 - 2] = 1
    return PinBus(tuple(levels))


@dataclass(frozen=True)
class HBridgeInput:
    en: int
    in1: int
    in2: int


DRIVE_FORWARD = HBridgeInput(1, 1, 0)
DRIVE_REVERSE = HBridgeInput(1, 0, 1)
DRIVE_BRAKE = HBridgeInput(1, 0, 0)
DRIVE_COAST = HBridgeInput(0, 0, 0)


@dataclass(frozen=True)
class MotorCommands:
    left: HBridgeInput = DRIVE_COAST
    right: HBridgeInput = DRIVE_COAST
    gripper: HBridgeInput = DRIVE_COAST


ALL_COAST = MotorCommands()


@dataclass(frozen=True)
class MotionState:
    action: Action = Action.IDLE
    awake: bool = True


@dataclass(frozen=True)
class IrReading:
    obstacle: bool = False
    distance: Optional[float] = None


def motion_step(state: MotionState, bus: PinBus, ir: IrReading,
                dt: float) -> tuple[MotionState, MotorCommands]:
    """One motion-controller poll: the highest-priority active pin wins.
    Forward is gated by the front IR sensor; everything else is not."""
    action = Action.IDLE
    for pin in PIN_PRIORITY:
        if bus.level(pin) == 1:
            action = pin_to_action(pin)
            break

    awake = state.awake
    if action == Action.SHUTDOWN:
        return MotionState(Action.IDLE, awake=False), ALL_COAST
    if action == Action.WAKE_UP:
        return MotionState(Action.IDLE, awake=True), ALL_COAST
    if not awake:
        return MotionState(Action.IDLE, awake=False), ALL_COAST

    if action == Action.FORWARD:
        if ir.obstacle:
            return MotionState(action, awake), MotorCommands(DRIVE_BRAKE, DRIVE_BRAKE,
                                                             DRIVE_COAST)
        return MotionState(action, awake), MotorCommands(DRIVE_FORWARD, DRIVE_FORWARD,
                                                         DRIVE_COAST)
    if action == Action.BACKWARD:
        return MotionState(action, awake), MotorCommands(DRIVE_REVERSE, DRIVE_REVERSE,
                                                         DRIVE_COAST)
    if action == Action.TURN_LEFT:
        return MotionState(action, awake), MotorCommands(DRIVE_REVERSE, DRIVE_FORWARD,
                                                         DRIVE_COAST)
    if action == Action.TURN_RIGHT:
        return MotionState(action, awake), MotorCommands(DRIVE_FORWARD, DRIVE_REVERSE,
                                                         DRIVE_COAST)
    if action == Action.GRIP_OPEN:
        return MotionState(action, awake), MotorCommands(DRIVE_COAST, DRIVE_COAST,
                                                         DRIVE_FORWARD)
    if action == Action.GRIP_CLOSE:
        return MotionState(action, awake), MotorCommands(DRIVE_COAST, DRIVE_COAST,
                                                         DRIVE_REVERSE)
    return MotionState(Action.IDLE, awake), ALL_COAST


class CommsMode(Enum):
    IDLE = "idle"
    CAPTURING = "capturing"
    RECEIVING = "receiving"


@dataclass(frozen=True)
class CommsState:
    mode: CommsMode = CommsMode.IDLE
    vad: VadState = field(default_factory=VadState)
    server_free: bool = False  # last received status; unknown counts as busy
    last_poll_ms: Optional[int] = None


@dataclass
class CommsStepResult:
    state: CommsState
    outbound: list[Frame]
    pin_writes: list[tuple[int, int]]
    speaker: array


def comms_step(state: CommsState, inbound: list[Frame],
               mic_frame, now_ms: int) -> CommsStepResult:
    """One comms-controller step: drain server data, advance the VAD over
    the next mic frame (if one is due), and forward the frame upstream only
    while the last received status said Free."""
    outbound: list[Frame] = []
    pin_writes: list[tuple[int, int]] = []
    speaker = array("h")

    free = state.server_free
    for frame in inbound:
        if isinstance(frame, StatusResponse):
            free = frame.state == ServerState.FREE
        elif isinstance(frame, BinaryCommand):
            pin_writes.append((frame.pin, frame.level))
        elif isinstance(frame, SynthAudio):
            speaker.extend(samples_from_bytes(frame.pcm))
        # TextCommand and anything else: nothing for this hardware to do

    vad = state.vad
    emit_audio = False
    if mic_frame is not None:
        vad, event = vad_step(vad, mic_frame)
        # capture gate: no audio upstream unless the server said Free; the
        # END frame is still forwarded so the server's own endpointing closes
        emit_audio = free and (vad.active or event == VadEvent.UTTERANCE_END)
        if emit_audio:
            mic = mic_frame if isinstance(mic_frame, array) else array("h", mic_frame)
            outbound.append(Audio(samples_to_bytes(mic)))

    capturing = free and vad.active
    last_poll = state.last_poll_ms
    if not capturing:
        if last_poll is None or now_ms - last_poll >= STATUS_POLL_MS:
            outbound.append(StatusRequest())
            last_poll = now_ms

    if capturing:
        mode = CommsMode.CAPTURING
    elif len(speaker):
        mode = CommsMode.RECEIVING
    else:
        mode = CommsMode.IDLE

    new_state = CommsState(mode=mode, vad=vad, server_free=free,
                           last_poll_ms=last_poll)
    return CommsStepResult(new_state, outbound, pin_writes, speaker)
