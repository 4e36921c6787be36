import { describe, expect, it } from "vitest";

import {
  applyEvent,
  applySnapshot,
  initialState,
  isStale,
  submitText,
} from "../src/state.js";
import type { OpsEvent, SnapshotMessage } from "../src/types.js";

const ev = (fields: Partial<OpsEvent> & { type: string; t?: number }): OpsEvent =>
  ({ t: 0, ...fields }) as OpsEvent;

describe("snapshot", () => {
  it("stores world geometry and robot serial", () => {
    const state = initialState();
    const snap: SnapshotMessage = {
      type: "snapshot",
      world: { obstacles: [{ x: 1, y: 0, r: 0.1 }], objects: [], drop_zones: [] },
      robot_serial: 7,
    };
    applySnapshot(state, snap);
    expect(state.world?.obstacles).toHaveLength(1);
    expect(state.robotSerial).toBe(7);
  });
});

describe("event reduction", () => {
  it("tracks pose without logging the 10 Hz feed", () => {
    const state = initialState();
    applyEvent(state, ev({ type: "pose", t: 100, x: 0.5, y: -0.25, theta: 1.0,
                           aperture: 0.4, held: "box", ir: true }), 5000);
    expect(state.pose).toEqual({ x: 0.5, y: -0.25, theta: 1.0 });
    expect(state.aperture).toBe(0.4);
    expect(state.held).toBe("box");
    expect(state.irObstacle).toBe(true);
    expect(state.lastPoseLocalMs).toBe(5000);
    expect(state.log).toHaveLength(0);
  });

  it("logs recognitions and dispatches with server timestamps", () => {
    const state = initialState();
    applyEvent(state, ev({ type: "recognized", t: 120, text: "move forward",
                           source: "text" }), 0);
    applyEvent(state, ev({ type: "dispatch", t: 120, idx: 0, action: "binary",
                           pin: 3, level: 1, target: 7 }), 0);
    expect(state.log).toHaveLength(2);
    expect(state.log[0].t).toBe(120);
    expect(state.log[0].line).toContain("move forward");
    expect(state.log[1].line).toContain("pin 3=1");
  });

  it("updates the pin bus", () => {
    const state = initialState();
    applyEvent(state, ev({ type: "pinbus", t: 10,
                           pins: { "2": 0, "3": 1, "4": 0, "5": 0,
                                   "6": 0, "7": 0, "8": 0, "9": 0 } }), 0);
    expect(state.pins["3"]).toBe(1);
  });

  it("asks the host to play ack audio", () => {
    const state = initialState();
    const effects = applyEvent(state, ev({ type: "ack_audio", t: 10,
                                           text: "moving forward",
                                           wav_base64: "UklGRg==" }), 0);
    expect(effects.playWav).toBe("UklGRg==");
    expect(state.log[0].line).toContain('ack "moving forward"');
  });
});

describe("busy gating and queueing", () => {
  it("rejects empty input client-side", () => {
    const state = initialState();
    expect(submitText(state, "   ").kind).toBe("rejected");
  });

  it("sends immediately while free", () => {
    const state = initialState();
    const result = submitText(state, " move forward ");
    expect(result).toEqual({ kind: "send", text: "move forward" });
  });

  it("queues while busy and releases on the next free status", () => {
    const state = initialState();
    applyEvent(state, ev({ type: "status", t: 0, serial: 0, state: "busy" }), 0);
    expect(state.consoleBusy).toBe(true);
    expect(submitText(state, "turn left").kind).toBe("queued");
    const effects = applyEvent(state, ev({ type: "status", t: 500, serial: 0,
                                           state: "free" }), 0);
    expect(effects.sendNow).toBe("turn left");
    expect(state.queuedText).toBeNull();
  });

  it("ignores another device's status for the input gate", () => {
    const state = initialState();
    applyEvent(state, ev({ type: "status", t: 0, serial: 7, state: "busy" }), 0);
    expect(state.consoleBusy).toBe(false);
  });
});

describe("staleness", () => {
  it("is stale with no pose, fresh within a second", () => {
    const state = initialState();
    expect(isStale(state, 0)).toBe(true);
    applyEvent(state, ev({ type: "pose", t: 0, x: 0, y: 0, theta: 0 }), 1000);
    expect(isStale(state, 1500)).toBe(false);
    expect(isStale(state, 2100)).toBe(true);
  });
});

describe("log bound", () => {
  it("keeps at most 300 entries", () => {
    const state = initialState();
    for (let i = 0; i < 400; i++) {
      applyEvent(state, ev({ type: "no_match", t: i, text: `x${i}` }), 0);
    }
    expect(state.log).toHaveLength(300);
    expect(state.log[0].line).toContain("x100");
  });
});
