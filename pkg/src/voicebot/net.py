"""Live mode: the TCP device endpoint, the ops WebSocket for consoles, and
the wall-clock ticker. One asyncio loop runs everything; the server core is
synchronous and only ever touched from that loop.

Ops feed: every trace event goes out as one JSON text message. Clients get
a ``snapshot`` message on connect (world geometry + robot serial) and may
send ``{"type": "text_command", "text": ...}``,
``{"type": "audio_command", "wav_base64": ...}``, and - from a robot
process attached over TCP - ``{"type": "telemetry", ...}`` to feed the
pose/pinbus stream.
"""

from __future__ import annotations

import asyncio
import base64
import binascii
import http.server
import json
import logging
import threading
from functools import partial
from typing import Optional

from websockets.asyncio.server import broadcast, serve

from voicebot.audio.pcm import AudioError, clip_from_wav_bytes, read_wav
from voicebot.clock import WallClock
from voicebot.harness import Rig, RobotHost
from voicebot.protocol import (
    Bye,
    FrameReader,
    Hello,
    ProtocolError,
    encode_frame,
)
from voicebot.server.core import CONSOLE_SERIAL, ProtocolViolation, ServerCore
from voicebot.server.registry import RegistryError
from voicebot.server.schema import load_schema_file
from voicebot.server.trace import Trace
from voicebot.sim.physics import IrSensorConfig
from voicebot.sim.world import load_world

log = logging.getLogger("voicebot.net")


class LiveServer:
    """TCP device endpoint + ops WebSocket around one ServerCore (or a whole
    Rig when hosting the robot in-process)."""

    def __init__(self, schema, world=None, tick_ms: int = 10,
                 trace_path=None):
        self.clock = WallClock()
        self.trace = Trace(self.clock, trace_path)
        self.trace.add_sink(self._on_event)
        self.tick_ms = tick_ms
        if world is not None:
            self.rig = Rig(world, schema, self.clock, self.trace, tick_ms,
                           ir_config=world.ir_config or IrSensorConfig())
            self.core: ServerCore = self.rig.core
            self._world_snapshot = world.snapshot()
        else:
            self.rig = None
            self.core = ServerCore(schema, self.clock, self.trace, tick_ms)
            self._world_snapshot = None
        self._writers: dict[int, asyncio.StreamWriter] = {}
        self._ops_clients: set = set()
        self._tcp_server = None
        self._ops_server = None
        self._ticker: Optional[asyncio.Task] = None
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self.tcp_port: Optional[int] = None
        self.ops_port: Optional[int] = None

    # -- lifecycle -----------------------------------------------------------

    async def start(self, host: str = "127.0.0.1", port: int = 5301,
                    ops_port: int = 5302) -> None:
        self._loop = asyncio.get_running_loop()
        self._tcp_server = await asyncio.start_server(self._handle_device,
                                                      host, port)
        self.tcp_port = self._tcp_server.sockets[0].getsockname()[1]
        self._ops_server = await serve(self._handle_ops, host, ops_port)
        self.ops_port = next(iter(self._ops_server.sockets)).getsockname()[1]
        self._ticker = asyncio.create_task(self._tick_loop())
        log.info("listening: devices tcp/%d, ops ws/%d", self.tcp_port,
                 self.ops_port)

    async def stop(self) -> None:
        if self._ticker:
            self._ticker.cancel()
            try:
                await self._ticker
            except asyncio.CancelledError:
                pass
        if self._tcp_server:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._ops_server:
            self._ops_server.close()
            await self._ops_server.wait_closed()
        self.trace.close()

    async def _tick_loop(self) -> None:
        # absolute pacing: the long-run tick rate stays at 1/tick_ms even
        # though each iteration does real work
        period = self.tick_ms / 1000.0
        loop = asyncio.get_running_loop()
        next_at = loop.time()
        while True:
            if self.rig is not None:
                self.rig.step()
            else:
                self.core.tick()
            self._flush_outbound()
            next_at += period
            delay = next_at - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_at = loop.time()  # fell behind; resync instead of spiraling

    def _flush_outbound(self) -> None:
        for serial, writer in list(self._writers.items()):
            session = self.core.registry.get(serial)
            if session is None:
                continue
            for frame in session.take_outbound():
                try:
                    writer.write(encode_frame(frame))
                except ConnectionError:
                    break
        self.core.console.take_outbound()  # mirrored on the ops feed already

    # -- device TCP ----------------------------------------------------------

    async def _handle_device(self, reader: asyncio.StreamReader,
                             writer: asyncio.StreamWriter) -> None:
        peer = writer.get_extra_info("peername")
        frames = FrameReader()
        serial = None
        try:
            while True:
                data = await reader.read(4096)
                if not data:
                    break
                try:
                    batch = frames.feed(data)
                except ProtocolError as exc:
                    log.warning("%s: protocol error: %s", peer, exc)
                    break
                for frame in batch:
                    if serial is None:
                        if not isinstance(frame, Hello):
                            log.warning("%s: first frame was %s, not Hello",
                                        peer, type(frame).__name__)
                            return
                        try:
                            self.core.connect(frame)
                        except RegistryError as exc:
                            log.warning("%s: rejected: %s", peer, exc)
                            return
                        serial = frame.serial
                        self._writers[serial] = writer
                    elif isinstance(frame, Bye):
                        self.core.handle_frame(serial, frame)
                        return
                    else:
                        try:
                            self.core.handle_frame(serial, frame)
                        except ProtocolViolation as exc:
                            log.warning("%s: %s", peer, exc)
                            return
                self._flush_outbound()
        finally:
            if serial is not None:
                self._writers.pop(serial, None)
                self.core.disconnect(serial)
            writer.close()

    # -- ops WebSocket ---------------------------------------------------------

    def _on_event(self, event: dict) -> None:
        if self._ops_clients:
            broadcast(self._ops_clients, json.dumps(event))

    async def _handle_ops(self, connection) -> None:
        self._ops_clients.add(connection)
        try:
            await connection.send(json.dumps({
                "type": "snapshot",
                "world": self._world_snapshot,
                "robot_serial": self.rig.robot_serial if self.rig else None,
            }))
            async for message in connection:
                self._on_ops_message(message)
        finally:
            self._ops_clients.discard(connection)

    def _on_ops_message(self, message) -> None:
        try:
            doc = json.loads(message)
        except json.JSONDecodeError:
            log.warning("ops: discarding non-JSON message")
            return
        kind = doc.get("type")
        if kind == "text_command":
            text = doc.get("text")
            if isinstance(text, str) and text.strip():
                self.core.submit_text(CONSOLE_SERIAL, text)
        elif kind == "audio_command":
            try:
                wav = base64.b64decode(doc.get("wav_base64", ""), validate=True)
                clip = clip_from_wav_bytes(wav)
            except (binascii.Error, AudioError) as exc:
                self.trace.emit("recognition_error", origin=CONSOLE_SERIAL,
                                error="BadUpload", detail=str(exc))
                return
            self.core.submit_audio(CONSOLE_SERIAL, clip.samples)
        elif kind == "telemetry":
            if "world" in doc:
                self._world_snapshot = doc["world"]
                return
            pose = doc.get("pose")
            if isinstance(pose, dict):
                self.trace.emit("pose", **pose)
            pins = doc.get("pins")
            if isinstance(pins, dict):
                self.trace.emit("pinbus", pins=pins)
        else:
            log.warning("ops: unknown message type %r", kind)


def _serve_static(directory: str, port: int):
    handler = partial(http.server.SimpleHTTPRequestHandler, directory=directory)
    httpd = http.server.ThreadingHTTPServer(("127.0.0.1", port), handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    log.info("console assets at http://127.0.0.1:%d/", port)
    return httpd


def serve_forever(schema_path, world_path=None, port=5301, ops_port=5302,
                  tick_ms=10, trace_path=None, console_dir=None,
                  http_port=5303) -> None:
    schema = load_schema_file(schema_path)
    world = load_world(world_path) if world_path else None

    async def main():
        server = LiveServer(schema, world, tick_ms, trace_path)
        await server.start(port=port, ops_port=ops_port)
        if console_dir:
            _serve_static(console_dir, http_port)
        print(f"voicebot server: devices tcp/{server.tcp_port}, "
              f"ops ws/{server.ops_port}"
              + (f", console http/{http_port}" if console_dir else ""))
        await asyncio.Event().wait()

    asyncio.run(main())


async def _robot_session(world_path, host, port, serial, wav_path, tick_ms,
                         ops_url, stop: Optional[asyncio.Event] = None) -> None:
    world = load_world(world_path)
    robot = RobotHost(world, tick_ms,
                      ir_config=world.ir_config or IrSensorConfig(),
                      serial=serial)
    clock = WallClock()
    reader, writer = await asyncio.open_connection(host, port)
    writer.write(encode_frame(robot.hello()))

    ops = None
    if ops_url:
        from websockets.asyncio.client import connect
        ops = await connect(ops_url)
        await ops.send(json.dumps({"type": "telemetry", "world": world.snapshot()}))

    if wav_path:
        robot.speak(read_wav(wav_path).samples)

    frames = FrameReader()
    inbound: list = []

    async def pump_inbound():
        while True:
            data = await reader.read(4096)
            if not data:
                return
            inbound.extend(frames.feed(data))

    pump = asyncio.create_task(pump_inbound())
    period = tick_ms / 1000.0
    ticks = 0
    pose_every = max(1, 80 // tick_ms)
    try:
        while stop is None or not stop.is_set():
            batch, inbound[:] = list(inbound), []
            tick = robot.step(batch, clock.now_ms)
            for frame in tick.outbound:
                writer.write(encode_frame(frame))
            if ops is not None and ticks % pose_every == 0:
                await ops.send(json.dumps({
                    "type": "telemetry",
                    "pose": robot.pose_event_fields(),
                    "pins": robot.pinbus_event_fields()["pins"],
                }))
            ticks += 1
            await asyncio.sleep(period)
    finally:
        pump.cancel()
        if ops is not None:
            await ops.close()
        writer.close()


def run_robot(world_path, host="127.0.0.1", port=5301, serial=7,
              wav_path=None, tick_ms=10, ops_url=None) -> None:
    asyncio.run(_robot_session(world_path, host, port, serial, wav_path,
                               tick_ms, ops_url))
