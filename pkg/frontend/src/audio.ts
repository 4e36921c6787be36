// Client-side audio plumbing. The server speaks exactly one format:
// 16-bit signed little-endian mono PCM at 8000 Hz, wrapped in a canonical
// 44-byte-header WAV for the ops channel. Everything recorded or uploaded
// in the browser is converted to that format here.

export const TARGET_RATE = 8000;

export function floatTo16(sample: number): number {
  const scaled = Math.round(sample * 32767);
  return Math.max(-32768, Math.min(32767, scaled));
}

/** Linear-interpolation resample of float samples (-1..1) to 8 kHz int16. */
export function resampleTo8k(input: Float32Array, inRate: number): Int16Array {
  if (inRate === TARGET_RATE) {
    const out = new Int16Array(input.length);
    for (let i = 0; i < input.length; i++) out[i] = floatTo16(input[i]);
    return out;
  }
  const ratio = inRate / TARGET_RATE;
  const n = Math.floor(input.length / ratio);
  const out = new Int16Array(n);
  for (let i = 0; i < n; i++) {
    const pos = i * ratio;
    const i0 = Math.floor(pos);
    const i1 = Math.min(i0 + 1, input.length - 1);
    const frac = pos - i0;
    out[i] = floatTo16(input[i0] * (1 - frac) + input[i1] * frac);
  }
  return out;
}

export function resampleInt16(input: Int16Array, inRate: number): Int16Array {
  if (inRate === TARGET_RATE) return input;
  const floats = new Float32Array(input.length);
  for (let i = 0; i < input.length; i++) floats[i] = input[i] / 32767;
  return resampleTo8k(floats, inRate);
}

/** Canonical 44-byte-header mono 16-bit WAV. */
export function wavEncode(samples: Int16Array, rate = TARGET_RATE): Uint8Array {
  const dataLen = samples.length * 2;
  const buf = new ArrayBuffer(44 + dataLen);
  const view = new DataView(buf);
  const ascii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };
  ascii(0, "RIFF");
  view.setUint32(4, 36 + dataLen, true);
  ascii(8, "WAVE");
  ascii(12, "fmt ");
  view.setUint32(16, 16, true); // PCM fmt chunk
  view.setUint16(20, 1, true); // uncompressed
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, rate, true);
  view.setUint32(28, rate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  ascii(36, "data");
  view.setUint32(40, dataLen, true);
  for (let i = 0; i < samples.length; i++) {
    view.setInt16(44 + i * 2, samples[i], true);
  }
  return new Uint8Array(buf);
}

export interface WavData {
  samples: Int16Array;
  rate: number;
}

/** Parse a 16-bit PCM mono/stereo WAV (stereo is averaged to mono). */
export function wavDecode(bytes: Uint8Array): WavData {
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const tag = (offset: number) =>
    String.fromCharCode(view.getUint8(offset), view.getUint8(offset + 1),
                        view.getUint8(offset + 2), view.getUint8(offset + 3));
  if (bytes.length < 44 || tag(0) !== "RIFF" || tag(8) !== "WAVE") {
    throw new Error("not a WAV file");
  }
  let pos = 12;
  let rate = 0;
  let channels = 0;
  let bits = 0;
  let data: Uint8Array | null = null;
  while (pos + 8 <= bytes.length) {
    const id = tag(pos);
    const size = view.getUint32(pos + 4, true);
    if (id === "fmt ") {
      const format = view.getUint16(pos + 8, true);
      if (format !== 1) throw new Error("only uncompressed PCM supported");
      channels = view.getUint16(pos + 10, true);
      rate = view.getUint32(pos + 12, true);
      bits = view.getUint16(pos + 22, true);
    } else if (id === "data") {
      data = bytes.subarray(pos + 8, pos + 8 + size);
    }
    pos += 8 + size + (size % 2);
  }
  if (!rate || !data) throw new Error("missing fmt or data chunk");
  if (bits !== 16) throw new Error(`need 16-bit samples, got ${bits}`);
  if (channels !== 1 && channels !== 2) throw new Error(`unsupported channel count ${channels}`);
  const dview = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const frames = Math.floor(data.byteLength / (2 * channels));
  const samples = new Int16Array(frames);
  for (let i = 0; i < frames; i++) {
    if (channels === 1) {
      samples[i] = dview.getInt16(i * 2, true);
    } else {
      const left = dview.getInt16(i * 4, true);
      const right = dview.getInt16(i * 4 + 2, true);
      samples[i] = Math.round((left + right) / 2);
    }
  }
  return { samples, rate };
}

const B64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

/** Base64 without btoa/atob so the same code runs in tests and browsers. */
export function bytesToBase64(bytes: Uint8Array): string {
  let out = "";
  for (let i = 0; i < bytes.length; i += 3) {
    const a = bytes[i];
    const b = i + 1 < bytes.length ? bytes[i + 1] : 0;
    const c = i + 2 < bytes.length ? bytes[i + 2] : 0;
    out += B64[a >> 2] + B64[((a & 3) << 4) | (b >> 4)];
    out += i + 1 < bytes.length ? B64[((b & 15) << 2) | (c >> 6)] : "=";
    out += i + 2 < bytes.length ? B64[c & 63] : "=";
  }
  return out;
}

export function base64ToBytes(text: string): Uint8Array {
  const clean = text.replace(/=+$/, "");
  const out = new Uint8Array(Math.floor((clean.length * 3) / 4));
  let acc = 0;
  let bits = 0;
  let pos = 0;
  for (const ch of clean) {
    const value = B64.indexOf(ch);
    if (value < 0) throw new Error(`bad base64 character ${ch}`);
    acc = (acc << 6) | value;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out[pos++] = (acc >> bits) & 0xff;
    }
  }
  return out;
}
