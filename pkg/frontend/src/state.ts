// Console session state: a reducer over the server's event stream. The
// console owns no physics; everything rendered comes from server events,
// so a page reload rebuilds the same view from the snapshot + live feed.

import type { LogEntry, OpsEvent, Pose, SnapshotMessage, WorldSnapshot } from "./types.js";

export const CONSOLE_SERIAL = 0; // the server's pseudo-device for operator input
export const LOG_LIMIT = 300;
export const STALE_AFTER_MS = 1000;

export interface ConsoleState {
  connected: boolean;
  consoleBusy: boolean;
  queuedText: string | null;
  world: WorldSnapshot | null;
  robotSerial: number | null;
  pose: Pose | null;
  lastPoseLocalMs: number | null;
  pins: Record<string, number>;
  aperture: number;
  held: string | null;
  irObstacle: boolean;
  log: LogEntry[];
}

export function initialState(): ConsoleState {
  return {
    connected: false,
    consoleBusy: false,
    queuedText: null,
    world: null,
    robotSerial: null,
    pose: null,
    lastPoseLocalMs: null,
    pins: { "2": 0, "3": 0, "4": 0, "5": 0, "6": 0, "7": 0, "8": 0, "9": 0 },
    aperture: 1,
    held: null,
    irObstacle: false,
    log: [],
  };
}

/** Side effects the reducer asks the host to perform. */
export interface Effects {
  sendNow?: string; // a queued text command released by a Free status
  playWav?: string; // base64 WAV from an ack_audio event
}

function pushLog(state: ConsoleState, t: number, line: string): void {
  state.log.push({ t, line });
  if (state.log.length > LOG_LIMIT) {
    state.log.splice(0, state.log.length - LOG_LIMIT);
  }
}

function describe(ev: OpsEvent): string | null {
  switch (ev.type) {
    case "recognized":
      return `recognized "${ev.text}" (${ev.source})`;
    case "no_match":
      return `no match: "${ev.text}"`;
    case "recognition_error":
      return `recognition failed: ${ev.error}`;
    case "dispatch":
      if (ev.action === "binary") {
        return `dispatch #${ev.idx} pin ${ev.pin}=${ev.level} -> device ${ev.target}`;
      }
      return `dispatch #${ev.idx} ${ev.action} "${ev.text}" -> device ${ev.target}`;
    case "status":
      return `device ${ev.serial} ${ev.state}`;
    case "ack_audio":
      return `ack "${ev.text}"`;
    case "brake": {
      const d = typeof ev.distance === "number" ? ` at ${ev.distance.toFixed(3)} m` : "";
      return `IR brake${d}`;
    }
    case "target_offline":
      return `target device ${ev.target} offline`;
    case "device_connected":
      return `device ${ev.serial} connected (${ev.kind}, engine ${ev.sre_id})`;
    case "device_bye":
      return `device ${ev.serial} disconnected`;
    default:
      return null;
  }
}

export function applySnapshot(state: ConsoleState, snap: SnapshotMessage): void {
  state.world = snap.world;
  state.robotSerial = snap.robot_serial;
}

export function applyEvent(state: ConsoleState, ev: OpsEvent,
                           localNowMs: number): Effects {
  const effects: Effects = {};
  switch (ev.type) {
    case "pose":
      state.pose = { x: ev.x as number, y: ev.y as number, theta: ev.theta as number };
      state.aperture = (ev.aperture as number) ?? state.aperture;
      state.held = (ev.held as string | null) ?? null;
      state.irObstacle = Boolean(ev.ir);
      state.lastPoseLocalMs = localNowMs;
      return effects; // 10 Hz feed; not logged
    case "pinbus":
      state.pins = { ...(ev.pins as Record<string, number>) };
      break;
    case "status":
      if (ev.serial === CONSOLE_SERIAL) {
        state.consoleBusy = ev.state === "busy";
        if (!state.consoleBusy && state.queuedText) {
          effects.sendNow = state.queuedText;
          state.queuedText = null;
        }
      }
      break;
    case "ack_audio":
      if (typeof ev.wav_base64 === "string") {
        effects.playWav = ev.wav_base64;
      }
      break;
  }
  const line = describe(ev);
  if (line !== null) {
    pushLog(state, ev.t, line);
  }
  return effects;
}

export type SubmitResult =
  | { kind: "rejected"; reason: string }
  | { kind: "queued" }
  | { kind: "send"; text: string };

/** Operator pressed enter: empty input is rejected client-side, input
 * while the console's engine is Busy queues (sent on the next Free). */
export function submitText(state: ConsoleState, raw: string): SubmitResult {
  const text = raw.trim();
  if (!text) {
    return { kind: "rejected", reason: "empty command" };
  }
  if (state.consoleBusy) {
    state.queuedText = text;
    return { kind: "queued" };
  }
  return { kind: "send", text };
}

export function isStale(state: ConsoleState, localNowMs: number): boolean {
  if (state.lastPoseLocalMs === null) return true;
  return localNowMs - state.lastPoseLocalMs > STALE_AFTER_MS;
}
