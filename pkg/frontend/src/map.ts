// 2D world rendering: obstacles, drop zones, movable objects, the robot
// body with heading and IR cone. World coordinates are meters, +y up;
// the canvas viewport is centered on the origin.

import type { ConsoleState } from "./state.js";

const SCALE = 280; // px per meter
const BODY_RADIUS = 0.09; // drawn body size; server owns the real value
const IR_HALF_ANGLE = Math.PI / 6;
const IR_RANGE = 0.3;

export function drawMap(canvas: HTMLCanvasElement, state: ConsoleState): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);

  const sx = (x: number) => w / 2 + x * SCALE;
  const sy = (y: number) => h / 2 - y * SCALE;

  ctx.strokeStyle = "#223";
  ctx.lineWidth = 1;
  for (let m = -2; m <= 2; m += 0.25) {
    ctx.beginPath();
    ctx.moveTo(sx(m), 0);
    ctx.lineTo(sx(m), h);
    ctx.moveTo(0, sy(m));
    ctx.lineTo(w, sy(m));
    ctx.stroke();
  }

  const world = state.world;
  if (world) {
    for (const zone of world.drop_zones) {
      ctx.beginPath();
      ctx.setLineDash([6, 4]);
      ctx.strokeStyle = "#2a7";
      ctx.lineWidth = 2;
      ctx.arc(sx(zone.x), sy(zone.y), zone.r * SCALE, 0, Math.PI * 2);
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.fillStyle = "#2a7";
      ctx.font = "12px sans-serif";
      ctx.fillText(zone.name ?? "", sx(zone.x) - 14, sy(zone.y - zone.r) + 14);
    }
    for (const obstacle of world.obstacles) {
      ctx.beginPath();
      ctx.fillStyle = "#556";
      ctx.arc(sx(obstacle.x), sy(obstacle.y), obstacle.r * SCALE, 0, Math.PI * 2);
      ctx.fill();
    }
    for (const object of world.objects) {
      const heldByRobot = state.held === object.id;
      ctx.beginPath();
      ctx.fillStyle = heldByRobot ? "#fb3" : "#f80";
      ctx.arc(sx(object.x), sy(object.y), Math.max(3, object.r * SCALE), 0,
              Math.PI * 2);
      ctx.fill();
    }
  }

  const pose = state.pose;
  if (!pose) return;
  const px = sx(pose.x);
  const py = sy(pose.y);

  // IR cone from the body front
  const fx = sx(pose.x + BODY_RADIUS * Math.cos(pose.theta));
  const fy = sy(pose.y + BODY_RADIUS * Math.sin(pose.theta));
  ctx.beginPath();
  ctx.moveTo(fx, fy);
  ctx.arc(fx, fy, IR_RANGE * SCALE, -(pose.theta + IR_HALF_ANGLE),
          -(pose.theta - IR_HALF_ANGLE));
  ctx.closePath();
  ctx.fillStyle = state.irObstacle ? "rgba(255,80,80,0.25)" : "rgba(80,255,120,0.12)";
  ctx.fill();

  // body and heading
  ctx.beginPath();
  ctx.fillStyle = "#49f";
  ctx.arc(px, py, BODY_RADIUS * SCALE, 0, Math.PI * 2);
  ctx.fill();
  ctx.beginPath();
  ctx.strokeStyle = "#fff";
  ctx.lineWidth = 2;
  ctx.moveTo(px, py);
  ctx.lineTo(fx, fy);
  ctx.stroke();
}

/** Min/max waveform strip for the last played acknowledgement. */
export function drawWaveform(canvas: HTMLCanvasElement, samples: Int16Array): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#8cf";
  const per = Math.max(1, Math.floor(samples.length / w));
  for (let col = 0; col < w; col++) {
    let lo = 0;
    let hi = 0;
    const base = col * per;
    if (base >= samples.length) break;
    for (let i = base; i < Math.min(base + per, samples.length); i++) {
      lo = Math.min(lo, samples[i]);
      hi = Math.max(hi, samples[i]);
    }
    const y0 = h / 2 - (hi / 32768) * (h / 2);
    const y1 = h / 2 - (lo / 32768) * (h / 2);
    ctx.fillRect(col, y0, 1, Math.max(1, y1 - y0));
  }
}
