// Pure heatmap rendering: centikelvin cells -> RGBA pixels. Same frame and
// range always produce identical bytes, so rendering is snapshot-testable.

import { INVALID_RGB, LUT } from "./colormap.js";
import type { FrameMsg } from "./protocol.js";

export interface ColorRange {
  loCk: number;
  hiCk: number;
}

// Auto range spans the current frame's valid cells; a uniform frame locks to
// +-0.5 K (50 centikelvin) around its value so it still renders mid-scale.
export function autoRange(frame: FrameMsg): ColorRange {
  let lo = Infinity;
  let hi = -Infinity;
  for (let i = 0; i < frame.cells.length; i++) {
    const c = frame.cells[i];
    if (c === 0) continue;
    if (c < lo) lo = c;
    if (c > hi) hi = c;
  }
  if (!Number.isFinite(lo)) return { loCk: 29_500, hiCk: 30_500 };
  if (lo === hi) return { loCk: lo - 50, hiCk: lo + 50 };
  return { loCk: lo, hiCk: hi };
}

// Nearest-neighbor integer upscale: every source pixel covers exactly
// scale x scale canvas pixels, keeping the sensor's blocky geometry.
export function renderHeatmap(
  frame: FrameMsg, range: ColorRange, scale: number,
): Uint8ClampedArray {
  if (!Number.isInteger(scale) || scale < 1) {
    throw new Error(`scale must be a positive integer, got ${scale}`);
  }
  const outW = frame.width * scale;
  const outH = frame.height * scale;
  const rgba = new Uint8ClampedArray(outW * outH * 4);
  const span = Math.max(1, range.hiCk - range.loCk);

  for (let sy = 0; sy < frame.height; sy++) {
    for (let sx = 0; sx < frame.width; sx++) {
      const cell = frame.cells[sy * frame.width + sx];
      let r: number, g: number, b: number;
      if (cell === 0) {
        [r, g, b] = INVALID_RGB;
      } else {
        let x = (cell - range.loCk) / span;
        if (x < 0) x = 0;
        if (x > 1) x = 1;
        const idx = Math.round(x * 255) * 3;
        r = LUT[idx];
        g = LUT[idx + 1];
        b = LUT[idx + 2];
      }
      for (let dy = 0; dy < scale; dy++) {
        const rowStart = ((sy * scale + dy) * outW + sx * scale) * 4;
        for (let dx = 0; dx < scale; dx++) {
          const o = rowStart + dx * 4;
          rgba[o] = r;
          rgba[o + 1] = g;
          rgba[o + 2] = b;
          rgba[o + 3] = 255;
        }
      }
    }
  }
  return rgba;
}
