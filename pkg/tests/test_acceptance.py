"""Acceptance suite: every top-level criterion, one test each, at the
stated tolerances. Each test prints one PASS/FAIL line (run with -s to see
them on success).

The whole suite is headless: no console, no network, virtual clock only.
"""

import contextlib
import random
import time
from array import array

import numpy as np
import pytest

from voicebot.audio import AudioClip, DEFAULT_TABLE, CodecError, decode_phrase, encode_phrase
from voicebot.clock import VirtualClock
from voicebot.device import CommsState, comms_step
from voicebot.harness import Rig
from voicebot.protocol import (
    Audio,
    BinaryCommand,
    Bye,
    DeviceKind,
    FrameReader,
    Hello,
    ServerState,
    StatusRequest,
    StatusResponse,
    SynthAudio,
    TextCommand,
    decode_frame,
    encode_frame,
)
from voicebot.scenario import run_scenario
from voicebot.server.registry import Registry
from voicebot.server.schema import load_schema_file
from voicebot.server.trace import Trace
from voicebot.sim.physics import IrSensorConfig, Pose, RobotBody, integrate_pose, ir_sense, motor_speed
from voicebot.sim.simulation import Simulation
from voicebot.sim.world import Disc, WorldModel, load_world
from voicebot.sim import Drive


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


# ---------------------------------------------------------------------------
# Protocol round-trip: 10,000 randomized frames and 10,000 random chunkings,
# under 5 seconds.
# ---------------------------------------------------------------------------

def _random_frame(rnd):
    kind = rnd.randrange(8)
    if kind == 0:
        return Hello(DeviceKind(rnd.randrange(3)), rnd.getrandbits(32))
    if kind == 1:
        return StatusRequest()
    if kind == 2:
        return StatusResponse(ServerState(rnd.randrange(2)), rnd.getrandbits(32))
    if kind == 3:
        return Audio(rnd.randbytes(2 * rnd.randrange(0, 64)))
    if kind == 4:
        return BinaryCommand(rnd.randrange(2, 10), rnd.randrange(2))
    if kind == 5:
        return TextCommand("".join(chr(rnd.randrange(32, 0x2FF))
                                   for _ in range(rnd.randrange(0, 24))))
    if kind == 6:
        return SynthAudio(rnd.randbytes(2 * rnd.randrange(0, 64)))
    return Bye()


def test_protocol_round_trip_10k():
    with criterion("protocol-round-trip"):
        rnd = random.Random(2024)
        start = time.perf_counter()
        for _ in range(10_000):
            frame = _random_frame(rnd)
            wire = encode_frame(frame)
            decoded, consumed = decode_frame(wire)
            assert decoded == frame and consumed == len(wire)

        frames = [_random_frame(rnd) for _ in range(20)]
        stream = b"".join(encode_frame(f) for f in frames)
        for i in range(10_000):
            reader = FrameReader()
            got = []
            pos = 0
            r = random.Random(i)
            while pos < len(stream):
                step = r.randint(1, 96)
                got.extend(reader.feed(stream[pos:pos + step]))
                pos += step
            assert got == frames
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# Codec soundness: exact round-trip for the 20-sentence schema; >= 99.9%
# success at 20 dB SNR over 1000 seeds with zero wrong-sentence decodes.
# ---------------------------------------------------------------------------

def test_codec_soundness(demo_dir):
    with criterion("codec-soundness"):
        schema = load_schema_file(demo_dir / "schema.json")
        assert len(schema.entries) == 20
        vocab = schema.vocabulary
        sentences = [e.sentence for e in schema.entries]
        clips = {s: encode_phrase(s) for s in sentences}
        for s in sentences:
            assert decode_phrase(clips[s], DEFAULT_TABLE, vocab) == s

        successes = 0
        wrong = 0
        for seed in range(1000):
            sentence = sentences[seed % len(sentences)]
            base = np.frombuffer(clips[sentence].to_bytes(), dtype="<i2")
            rng = np.random.default_rng(seed)
            noise = rng.integers(-1600, 1601, size=base.shape[0], dtype=np.int32)
            noisy = np.clip(base.astype(np.int32) + noise, -32768, 32767)
            clip = AudioClip(array("h", noisy.astype(np.int16).tolist()))
            try:
                decoded = decode_phrase(clip, DEFAULT_TABLE, vocab)
            except CodecError:
                continue  # a rejection, not an error
            if decoded == sentence:
                successes += 1
            else:
                wrong += 1
        assert wrong == 0, f"{wrong} wrong-sentence decodes"
        assert successes >= 999, f"only {successes}/1000 decoded"


# ---------------------------------------------------------------------------
# Fig. 5(a) conformance: across 10,000 randomized traces the device never
# emits audio while the last received status was Busy.
# ---------------------------------------------------------------------------

LOUD_FRAME = array("h", [4000] * 256)
QUIET_FRAME = array("h", [0] * 256)


def test_fig5a_no_audio_while_busy():
    with criterion("fig5a-conformance"):
        rnd = random.Random(99)
        violations = 0
        for _ in range(10_000):
            state = CommsState()
            free = False  # nothing received yet counts as not-Free
            for step in range(20):
                inbound = []
                roll = rnd.random()
                if roll < 0.45:
                    now_free = roll < 0.225
                    inbound.append(StatusResponse(
                        ServerState.FREE if now_free else ServerState.BUSY,
                        step))
                    free = now_free
                mic = LOUD_FRAME if rnd.random() < 0.6 else QUIET_FRAME
                result = comms_step(state, inbound, mic, step * 32)
                state = result.state
                if any(isinstance(f, Audio) for f in result.outbound) and not free:
                    violations += 1
        assert violations == 0


# ---------------------------------------------------------------------------
# SRE exclusivity: 50 registrations, 50 distinct engines; release and
# re-register never collides with a live engine id.
# ---------------------------------------------------------------------------

def test_sre_exclusivity_50_devices():
    with criterion("sre-exclusivity"):
        registry = Registry()
        kinds = [DeviceKind.INPUT, DeviceKind.MIXED]
        for serial in range(1, 51):
            registry.register(Hello(kinds[serial % 2], serial))
        ids = registry.live_sre_ids()
        assert len(ids) == 50 and len(set(ids)) == 50

        rnd = random.Random(5)
        for _ in range(200):
            serial = rnd.randrange(1, 51)
            if registry.get(serial) is None:
                registry.register(Hello(kinds[serial % 2], serial))
            else:
                registry.release(serial)
            live = registry.live_sre_ids()
            assert len(live) == len(set(live))


# ---------------------------------------------------------------------------
# Dispatch timing: delays [0, 500, 250] dispatch in schema order with gaps in
# [declared, declared + one 10 ms tick] on the virtual clock.
# ---------------------------------------------------------------------------

def test_dispatch_timing(demo_dir):
    with criterion("dispatch-timing"):
        world = load_world(demo_dir / "world_forward.json")
        schema = load_schema_file(demo_dir / "schema.json")
        clock = VirtualClock()
        rig = Rig(world, schema, clock, Trace(clock))
        submit_at = 100
        while clock.now_ms <= 1500:
            if clock.now_ms == submit_at:
                rig.submit_text("run sequence alpha")
            rig.step()
        dispatches = [e for e in rig.trace.events if e["type"] == "dispatch"]
        assert [e["idx"] for e in dispatches] == [0, 1, 2]  # schema order
        times = [e["t"] for e in dispatches]
        declared = [0, 500, 250]
        gaps = [times[0] - submit_at, times[1] - times[0], times[2] - times[1]]
        for gap, want in zip(gaps, declared):
            assert want <= gap <= want + 10, (gaps, declared)


# ---------------------------------------------------------------------------
# Kinematics oracle: exact-arc integration matches RK4 at 1e-5 s substeps
# within 1e-6 relative error on 100 randomized cases; equal speeds keep the
# heading bit-exact.
# ---------------------------------------------------------------------------

def _rk4(pose, v_l, v_r, wheelbase, dt, substep=1e-5):
    """Classic RK4 on the differential-drive ODE. The theta equation is
    autonomous, so the x/y stage derivatives depend only on time; the
    per-step update reduces to h/6 * (k1 + 4*k_mid + k4), evaluated here for
    all steps at once."""
    v = 0.5 * (v_l + v_r)
    omega = (v_r - v_l) / wheelbase
    n = max(1, int(round(dt / substep)))
    h = dt / n
    t = np.arange(n, dtype=np.float64) * h
    th1 = pose.theta + omega * t
    thm = pose.theta + omega * (t + 0.5 * h)
    th4 = pose.theta + omega * (t + h)
    x = pose.x + (h / 6.0 * v * (np.cos(th1) + 4.0 * np.cos(thm) + np.cos(th4))).sum()
    y = pose.y + (h / 6.0 * v * (np.sin(th1) + 4.0 * np.sin(thm) + np.sin(th4))).sum()
    return x, y, pose.theta + omega * dt


def test_kinematics_against_rk4():
    with criterion("kinematics-oracle"):
        rnd = random.Random(12)
        for case in range(100):
            pose = Pose(rnd.uniform(-1, 1), rnd.uniform(-1, 1),
                        rnd.uniform(-3, 3))
            v_l = rnd.uniform(-0.5, 0.5)
            v_r = rnd.uniform(-0.5, 0.5)
            dt = rnd.uniform(0.01, 1.0)
            got = integrate_pose(pose, v_l, v_r, 0.12, dt)
            ex, ey, eth = _rk4(pose, v_l, v_r, 0.12, dt)
            for g, e in [(got.x, ex), (got.y, ey)]:
                assert abs(g - e) / max(1.0, abs(e)) < 1e-6, case
            # headings compared pre-normalization: both are theta0 + omega*dt
            assert abs(((v_r - v_l) / 0.12 * dt) - (eth - pose.theta)) < 1e-9

        for _ in range(100):
            theta0 = rnd.uniform(-3, 3)
            v = rnd.uniform(-0.5, 0.5)
            pose = Pose(0, 0, theta0)
            for _ in range(20):
                pose = integrate_pose(pose, v, v, 0.12, rnd.uniform(0.001, 0.05))
            assert pose.theta == theta0  # machine-precision constant


# ---------------------------------------------------------------------------
# Hardware constants: 300 RPM at 12 V, dead zone below 4 V, and the +/-30
# degree IR lobe boundary.
# ---------------------------------------------------------------------------

def test_hardware_constants():
    with criterion("hardware-constants"):
        assert abs(motor_speed(Drive.FORWARD, 12.0) - 31.416) <= 0.001
        assert motor_speed(Drive.FORWARD, 3.9) == 0.0
        body = RobotBody()
        cfg = IrSensorConfig()
        import math
        for deg, expected in [(29, True), (31, False)]:
            ang = math.radians(deg)
            world = WorldModel(obstacles=[
                Disc(0.09 + 0.2 * math.cos(ang), 0.2 * math.sin(ang), 0.0)])
            got = ir_sense(world, Pose(0, 0, 0), cfg, body).obstacle
            assert got is expected, f"bearing {deg} deg"


# ---------------------------------------------------------------------------
# End-to-end forward-with-obstacle scenario.
# ---------------------------------------------------------------------------

def test_forward_with_obstacle_scenario(demo_dir):
    with criterion("e2e-forward-obstacle"):
        report = run_scenario(demo_dir / "scenario_forward.json")
        assert report.passed, report.failures
        rig = report.rig
        clearance = rig.sim.front_clearance()
        assert 0.0 <= clearance <= rig.sim.ir_config.range
        assert rig.min_body_clearance >= -1e-9  # never penetrated
        assert report.events[-1]["t"] < 2000  # < 2 s virtual

        order = []
        for event in report.events:
            if event["type"] == "recognized" and "recognized" not in order:
                order.append("recognized")
            elif event["type"] == "dispatch" and "dispatch" not in order:
                order.append("dispatch")
            elif (event["type"] == "pinbus" and event["pins"].get("3") == 1
                  and "pin3" not in order):
                order.append("pin3")
            elif event["type"] == "brake" and "brake" not in order:
                order.append("brake")
        assert order == ["recognized", "dispatch", "pin3", "brake"]


# ---------------------------------------------------------------------------
# Relocate scenario: forward, grip close, turn, forward, grip open; the
# object ends inside the drop zone and reruns are byte-identical.
# ---------------------------------------------------------------------------

def test_relocate_scenario(demo_dir, tmp_path):
    with criterion("relocate-object"):
        trace_a = tmp_path / "a.jsonl"
        trace_b = tmp_path / "b.jsonl"
        report = run_scenario(demo_dir / "scenario_relocate.json", trace_path=trace_a)
        assert report.passed, report.failures
        box = report.rig.sim.world.objects["box"]
        zone = report.rig.sim.world.drop_zones["target"]
        assert (box.x - zone.x) ** 2 + (box.y - zone.y) ** 2 <= zone.r ** 2
        assert report.rig.sim.gripper.held is None

        report_b = run_scenario(demo_dir / "scenario_relocate.json",
                                trace_path=trace_b)
        assert report_b.passed
        assert trace_a.read_bytes() == trace_b.read_bytes()
        assert len(trace_a.read_bytes()) > 0


# ---------------------------------------------------------------------------
# Audio-path equivalence: TextCommand and codec-encoded audio produce the
# identical dispatch sequence (timestamps aside).
# ---------------------------------------------------------------------------

def _dispatch_signature(events):
    return [(e["action"], e["target"], e.get("pin"), e.get("level"),
             e.get("text")) for e in events if e["type"] == "dispatch"]


def test_audio_path_equivalence(demo_dir):
    with criterion("audio-path-equivalence"):
        world_path = demo_dir / "world_forward.json"
        schema = load_schema_file(demo_dir / "schema.json")
        sentence = "run sequence alpha"

        clock_a = VirtualClock()
        rig_a = Rig(load_world(world_path), schema, clock_a, Trace(clock_a))
        rig_a.run_for(100)
        rig_a.submit_text(sentence)
        rig_a.run_for(2500)

        clock_b = VirtualClock()
        rig_b = Rig(load_world(world_path), schema, clock_b, Trace(clock_b))
        rig_b.run_for(100)
        rig_b.speak(encode_phrase(sentence).samples)
        rig_b.run_for(2500)

        sig_a = _dispatch_signature(rig_a.trace.events)
        sig_b = _dispatch_signature(rig_b.trace.events)
        assert sig_a, "text path dispatched nothing"
        assert sig_a == sig_b
        # and both recognized the same sentence through different paths
        rec_a = [e for e in rig_a.trace.events if e["type"] == "recognized"]
        rec_b = [e for e in rig_b.trace.events if e["type"] == "recognized"]
        assert rec_a[0]["text"] == rec_b[0]["text"] == sentence
        assert rec_a[0]["source"] == "text" and rec_b[0]["source"] == "audio"
