// Raster replay of a stroke log, matching the analysis service bit for bit:
// pixel centers at (+0.5, +0.5), capsule coverage with inclusive distance,
// half-up rounding for source-over blending, exact-color 4-connected fill.
// All math is float64 (plain JS numbers), same operation order as the
// service's kernels, so a replayed session scores fidelity 1.0.

import type { DrawAction } from "./schema.js";

export interface Canvas {
  width: number;
  height: number;
  data: Uint8ClampedArray; // RGBA rows, alpha pinned to 255
}

export function createCanvas(width: number, height: number): Canvas {
  const data = new Uint8ClampedArray(width * height * 4);
  data.fill(255);
  return { width, height, data };
}

export function parseHex(color: string): [number, number, number] {
  return [
    parseInt(color.slice(1, 3), 16),
    parseInt(color.slice(3, 5), 16),
    parseInt(color.slice(5, 7), 16),
  ];
}

/** Coverage of a round-capped, round-joined polyline (one byte per pixel). */
export function capsuleMask(
  xs: number[], ys: number[], radius: number, height: number, width: number,
): Uint8Array {
  const mask = new Uint8Array(height * width);
  const r2 = radius * radius;
  const n = xs.length;
  if (n === 0) return mask;
  const segments = n > 1 ? n - 1 : 1;
  for (let i = 0; i < segments; i++) {
    const x0 = xs[i];
    const y0 = ys[i];
    const x1 = n > 1 ? xs[i + 1] : x0;
    const y1 = n > 1 ? ys[i + 1] : y0;
    let loC = Math.floor(Math.min(x0, x1) - radius);
    let hiC = Math.ceil(Math.max(x0, x1) + radius);
    let loR = Math.floor(Math.min(y0, y1) - radius);
    let hiR = Math.ceil(Math.max(y0, y1) + radius);
    if (loC < 0) loC = 0;
    if (hiC > width - 1) hiC = width - 1;
    if (loR < 0) loR = 0;
    if (hiR > height - 1) hiR = height - 1;
    if (loC > hiC || loR > hiR) continue;
    const dx = x1 - x0;
    const dy = y1 - y0;
    const len2 = dx * dx + dy * dy;
    for (let row = loR; row <= hiR; row++) {
      const py = row + 0.5;
      for (let col = loC; col <= hiC; col++) {
        const px = col + 0.5;
        let t = 0.0;
        if (len2 > 0.0) {
          t = ((px - x0) * dx + (py - y0) * dy) / len2;
          if (t < 0.0) t = 0.0;
          else if (t > 1.0) t = 1.0;
        }
        const cx = x0 + t * dx;
        const cy = y0 + t * dy;
        const d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy);
        if (d2 <= r2) mask[row * width + col] = 1;
      }
    }
  }
  return mask;
}

export function compositeOver(
  canvas: Canvas, mask: Uint8Array,
  r: number, g: number, b: number, alpha: number,
): void {
  const { width, height, data } = canvas;
  for (let row = 0; row < height; row++) {
    for (let col = 0; col < width; col++) {
      if (!mask[row * width + col]) continue;
      const k = (row * width + col) * 4;
      data[k] = Math.floor(data[k] + alpha * (r - data[k]) + 0.5);
      data[k + 1] = Math.floor(data[k + 1] + alpha * (g - data[k + 1]) + 0.5);
      data[k + 2] = Math.floor(data[k + 2] + alpha * (b - data[k + 2]) + 0.5);
    }
  }
}

export function fillWhite(canvas: Canvas, mask: Uint8Array): void {
  const { width, height, data } = canvas;
  for (let row = 0; row < height; row++) {
    for (let col = 0; col < width; col++) {
      if (!mask[row * width + col]) continue;
      const k = (row * width + col) * 4;
      data[k] = 255;
      data[k + 1] = 255;
      data[k + 2] = 255;
    }
  }
}

/** 4-connected exact-color flood fill; returns the filled pixel count. */
export function floodFill(
  canvas: Canvas, sy: number, sx: number,
  nr: number, ng: number, nb: number,
): number {
  const { width, height, data } = canvas;
  const seed = (sy * width + sx) * 4;
  const tr = data[seed];
  const tg = data[seed + 1];
  const tb = data[seed + 2];
  if (tr === nr && tg === ng && tb === nb) return 0;
  const stackX = new Int32Array(width * height);
  const stackY = new Int32Array(width * height);
  let sp = 0;
  stackX[sp] = sx;
  stackY[sp] = sy;
  sp++;
  data[seed] = nr;
  data[seed + 1] = ng;
  data[seed + 2] = nb;
  let count = 0;
  while (sp > 0) {
    sp--;
    const x = stackX[sp];
    const y = stackY[sp];
    count++;
    for (let k = 0; k < 4; k++) {
      const nx = k === 2 ? x - 1 : k === 3 ? x + 1 : x;
      const ny = k === 0 ? y - 1 : k === 1 ? y + 1 : y;
      if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
      const idx = (ny * width + nx) * 4;
      if (data[idx] === tr && data[idx + 1] === tg && data[idx + 2] === tb) {
        data[idx] = nr;
        data[idx + 1] = ng;
        data[idx + 2] = nb;
        stackX[sp] = nx;
        stackY[sp] = ny;
        sp++;
      }
    }
  }
  return count;
}

function clamp(v: number, lo: number, hi: number): number {
  return v < lo ? lo : v > hi ? hi : v;
}

export function applyAction(canvas: Canvas, action: DrawAction): void {
  const [r, g, b] = parseHex(action.color);
  if (action.action_type === "bucketFill") {
    const p = action.points[0];
    const sx = clamp(Math.floor(p.x), 0, canvas.width - 1);
    const sy = clamp(Math.floor(p.y), 0, canvas.height - 1);
    const k = (sy * canvas.width + sx) * 4;
    const a = action.opacity;
    const nr = Math.floor(canvas.data[k] + a * (r - canvas.data[k]) + 0.5);
    const ng = Math.floor(canvas.data[k + 1] + a * (g - canvas.data[k + 1]) + 0.5);
    const nb = Math.floor(canvas.data[k + 2] + a * (b - canvas.data[k + 2]) + 0.5);
    floodFill(canvas, sy, sx, nr, ng, nb);
    return;
  }
  const xs = action.points.map((p) => p.x);
  const ys = action.points.map((p) => p.y);
  const mask = capsuleMask(xs, ys, action.line_width / 2.0,
    canvas.height, canvas.width);
  if (action.action_type === "erase") {
    fillWhite(canvas, mask);
  } else {
    compositeOver(canvas, mask, r, g, b, action.opacity);
  }
}

/** Rebuild the full image from the log (the log is the source of truth). */
export function replay(actions: DrawAction[], width: number, height: number): Canvas {
  const canvas = createCanvas(width, height);
  for (const action of actions) applyAction(canvas, action);
  return canvas;
}
