/** Minimal canvas strip-chart painter (no chart library). */

import { Sample } from "./ring.js";

export interface Trace {
  samples: readonly Sample[];
  color: string;
  dashed?: boolean;
  label?: string;
}

export interface ChartOptions {
  title: string;
  unit: string;
  windowSeconds: number;
  yMin?: number;
  yMax?: number;
  invertY?: boolean; // depth charts grow downward
}

export function drawStripChart(
  canvas: HTMLCanvasElement,
  traces: Trace[],
  opts: ChartOptions,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#10151c";
  ctx.fillRect(0, 0, w, h);

  const left = 44;
  const bottom = h - 16;
  const top = 18;

  let tMax = 0;
  let yMin = opts.yMin ?? Infinity;
  let yMax = opts.yMax ?? -Infinity;
  for (const trace of traces) {
    for (const s of trace.samples) {
      tMax = Math.max(tMax, s.t);
      if (opts.yMin === undefined) yMin = Math.min(yMin, s.value);
      if (opts.yMax === undefined) yMax = Math.max(yMax, s.value);
    }
  }
  if (!Number.isFinite(yMin) || !Number.isFinite(yMax)) {
    yMin = 0;
    yMax = 1;
  }
  if (yMax - yMin < 1e-6) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  const pad = 0.08 * (yMax - yMin);
  yMin -= pad;
  yMax += pad;
  const tMin = Math.max(0, tMax - opts.windowSeconds);

  const xOf = (t: number) => left + ((t - tMin) / Math.max(1e-9, tMax - tMin)) * (w - left - 8);
  const yOf = (v: number) => {
    const frac = (v - yMin) / (yMax - yMin);
    return opts.invertY ? top + frac * (bottom - top) : bottom - frac * (bottom - top);
  };

  ctx.strokeStyle = "#2a3442";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(left, top);
  ctx.lineTo(left, bottom);
  ctx.lineTo(w - 8, bottom);
  ctx.stroke();

  ctx.fillStyle = "#8aa0b8";
  ctx.font = "10px monospace";
  ctx.fillText(`${opts.title} [${opts.unit}]`, left + 4, 12);
  ctx.fillText(yMax.toFixed(2), 2, opts.invertY ? bottom : top + 4);
  ctx.fillText(yMin.toFixed(2), 2, opts.invertY ? top + 4 : bottom);

  for (const trace of traces) {
    if (trace.samples.length === 0) continue;
    ctx.strokeStyle = trace.color;
    ctx.lineWidth = 1.4;
    ctx.setLineDash(trace.dashed ? [4, 3] : []);
    ctx.beginPath();
    let started = false;
    for (const s of trace.samples) {
      if (s.t < tMin) continue;
      const x = xOf(s.t);
      const y = yOf(s.value);
      if (!started) {
        ctx.moveTo(x, y);
        started = true;
      } else {
        ctx.lineTo(x, y);
      }
    }
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

/** Horizontal signed bar for one thruster duty in [-1, 1]. */
export function drawDutyBar(canvas: HTMLCanvasElement, label: string, duty: number): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#10151c";
  ctx.fillRect(0, 0, w, h);
  const mid = w / 2;
  ctx.strokeStyle = "#2a3442";
  ctx.strokeRect(4, 4, w - 8, h - 8);
  ctx.beginPath();
  ctx.moveTo(mid, 4);
  ctx.lineTo(mid, h - 4);
  ctx.stroke();
  const extent = (Math.max(-1, Math.min(1, duty)) * (w - 12)) / 2;
  ctx.fillStyle = duty >= 0 ? "#39b54a" : "#e06c30";
  if (extent >= 0) ctx.fillRect(mid, 7, extent, h - 14);
  else ctx.fillRect(mid + extent, 7, -extent, h - 14);
  ctx.fillStyle = "#c7d4e2";
  ctx.font = "11px monospace";
  ctx.fillText(`${label} ${duty.toFixed(2)}`, 8, h / 2 + 4);
}
