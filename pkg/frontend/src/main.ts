// Console entry point: wires the ops connection, the state reducer, the
// map renderer, the pin LEDs / gripper gauge, the event log, text and
// audio command inputs, and ack playback.

import { base64ToBytes, bytesToBase64, resampleInt16, resampleTo8k, wavDecode, wavEncode } from "./audio.js";
import { OpsConnection } from "./connection.js";
import { drawMap, drawWaveform } from "./map.js";
import { applyEvent, applySnapshot, initialState, isStale, submitText } from "./state.js";
import type { OpsEvent, SnapshotMessage } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const mapCanvas = $<HTMLCanvasElement>("map");
const waveCanvas = $<HTMLCanvasElement>("waveform");
const logList = $<HTMLUListElement>("log");
const textInput = $<HTMLInputElement>("command");
const sendButton = $<HTMLButtonElement>("send");
const micButton = $<HTMLButtonElement>("mic");
const fileInput = $<HTMLInputElement>("wavfile");
const banner = $<HTMLDivElement>("banner");
const pinRow = $<HTMLDivElement>("pins");
const gauge = $<HTMLDivElement>("gauge-fill");
const gaugeLabel = $<HTMLSpanElement>("gauge-label");
const noticeBox = $<HTMLDivElement>("notice");

const state = initialState();
let logDirty = false;

const params = new URLSearchParams(location.search);
const opsUrl = params.get("ops")
  ?? `ws://${location.hostname || "127.0.0.1"}:5302`;

function notice(text: string): void {
  noticeBox.textContent = text;
  noticeBox.classList.toggle("hidden", !text);
}

function setBusyUi(): void {
  const busy = state.consoleBusy;
  textInput.disabled = busy || !state.connected;
  sendButton.disabled = textInput.disabled;
  sendButton.textContent = state.queuedText ? "queued..." : "send";
}

// -- audio playback (server already applied the device volume) -------------

let audioCtx: AudioContext | null = null;

function playAck(wavBase64: string): void {
  try {
    const { samples, rate } = wavDecode(base64ToBytes(wavBase64));
    drawWaveform(waveCanvas, samples);
    audioCtx = audioCtx ?? new AudioContext();
    const buffer = audioCtx.createBuffer(1, samples.length, rate);
    const channel = buffer.getChannelData(0);
    for (let i = 0; i < samples.length; i++) channel[i] = samples[i] / 32768;
    const source = audioCtx.createBufferSource();
    source.buffer = buffer;
    source.connect(audioCtx.destination);
    source.start();
  } catch (err) {
    notice(`ack playback failed: ${err}`);
  }
}

// -- ops connection -----------------------------------------------------------

const connection = new OpsConnection(opsUrl, {
  onSnapshot(snapshot: SnapshotMessage) {
    applySnapshot(state, snapshot);
  },
  onEvent(ev: OpsEvent) {
    const effects = applyEvent(state, ev, performance.now());
    logDirty = true;
    if (effects.sendNow) {
      connection.send({ type: "text_command", text: effects.sendNow });
    }
    if (effects.playWav) {
      playAck(effects.playWav);
    }
    setBusyUi();
  },
  onOpen() {
    state.connected = true;
    notice("");
    setBusyUi();
  },
  onClose() {
    state.connected = false;
    setBusyUi();
  },
});
connection.start();

// -- text path -------------------------------------------------------------------

function trySend(): void {
  const result = submitText(state, textInput.value);
  if (result.kind === "rejected") {
    notice(result.reason);
    return;
  }
  notice("");
  if (result.kind === "send") {
    connection.send({ type: "text_command", text: result.text });
  }
  textInput.value = "";
  setBusyUi();
}

sendButton.addEventListener("click", trySend);
textInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") trySend();
});

// -- audio path: microphone ---------------------------------------------------------

let recorder: MediaRecorder | null = null;
let chunks: Blob[] = [];

async function sendPcm(samples: Int16Array): Promise<void> {
  const wav = wavEncode(samples);
  connection.send({ type: "audio_command", wav_base64: bytesToBase64(wav) });
}

micButton.addEventListener("click", async () => {
  if (recorder) {
    recorder.stop();
    return;
  }
  let stream: MediaStream;
  try {
    stream = await navigator.mediaDevices.getUserMedia({ audio: true });
  } catch {
    notice("MicUnavailable: microphone permission denied; the text path still works");
    return;
  }
  recorder = new MediaRecorder(stream);
  chunks = [];
  recorder.ondataavailable = (ev) => {
    if (ev.data.size > 0) chunks.push(ev.data);
  };
  recorder.onstop = async () => {
    stream.getTracks().forEach((track) => track.stop());
    micButton.textContent = "speak";
    recorder = null;
    try {
      const blob = new Blob(chunks);
      const decoded = await (audioCtx ?? (audioCtx = new AudioContext()))
        .decodeAudioData(await blob.arrayBuffer());
      // average channels, then down to the one server format
      const mono = new Float32Array(decoded.length);
      for (let ch = 0; ch < decoded.numberOfChannels; ch++) {
        const data = decoded.getChannelData(ch);
        for (let i = 0; i < decoded.length; i++) mono[i] += data[i];
      }
      for (let i = 0; i < mono.length; i++) mono[i] /= decoded.numberOfChannels;
      await sendPcm(resampleTo8k(mono, decoded.sampleRate));
    } catch (err) {
      notice(`EncodingError: ${err}`);
    }
  };
  recorder.start();
  micButton.textContent = "stop";
});

// -- audio path: WAV upload (any rate; resampled client-side) ------------------------

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  fileInput.value = "";
  try {
    const bytes = new Uint8Array(await file.arrayBuffer());
    const { samples, rate } = wavDecode(bytes);
    await sendPcm(resampleInt16(samples, rate));
    notice("");
  } catch (err) {
    notice(`EncodingError: ${err}`);
  }
});

// -- rendering loop --------------------------------------------------------------------

const PIN_ORDER = ["2", "3", "4", "5", "6", "7", "8", "9"];
const leds: HTMLSpanElement[] = PIN_ORDER.map((pin) => {
  const led = document.createElement("span");
  led.className = "led";
  led.title = `pin ${pin}`;
  led.textContent = pin;
  pinRow.appendChild(led);
  return led;
});

function renderLog(): void {
  if (!logDirty) return;
  logDirty = false;
  logList.replaceChildren(
    ...state.log.slice(-200).map((entry) => {
      const li = document.createElement("li");
      li.textContent = `[${String(entry.t).padStart(6, " ")} ms] ${entry.line}`;
      return li;
    }));
  logList.scrollTop = logList.scrollHeight;
}

function frame(): void {
  drawMap(mapCanvas, state);
  PIN_ORDER.forEach((pin, i) => {
    leds[i].classList.toggle("on", state.pins[pin] === 1);
  });
  const percent = Math.round(state.aperture * 100);
  gauge.style.width = `${percent}%`;
  gaugeLabel.textContent = state.held
    ? `${percent}% (holding ${state.held})`
    : `${percent}%`;
  const stale = isStale(state, performance.now());
  banner.textContent = !state.connected
    ? "disconnected - retrying"
    : stale ? "stale data: no pose for over 1 s" : "";
  banner.classList.toggle("hidden", banner.textContent === "");
  renderLog();
  requestAnimationFrame(frame);
}

setBusyUi();
requestAnimationFrame(frame);
