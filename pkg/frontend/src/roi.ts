// Pointer-drag to image-coordinate ROI mapping.

import type { Roi } from "./protocol.js";

// Canvas coordinates map to image pixels by integer downscale (floor). The
// rectangle is end-exclusive, normalized regardless of drag direction, and
// clamped to the image; a sub-minimum rectangle yields null (nothing is sent).
export function dragToRoi(
  x0: number, y0: number, x1: number, y1: number,
  scale: number, imgW: number, imgH: number,
): Roi | null {
  const ax = Math.floor(Math.min(x0, x1) / scale);
  const ay = Math.floor(Math.min(y0, y1) / scale);
  const bx = Math.floor(Math.max(x0, x1) / scale);
  const by = Math.floor(Math.max(y0, y1) / scale);

  let x = Math.max(0, Math.min(ax, imgW - 1));
  let y = Math.max(0, Math.min(ay, imgH - 1));
  let w = bx - x;
  let h = by - y;
  if (x + w > imgW) w = imgW - x;
  if (y + h > imgH) h = imgH - y;
  if (w <= 0 || h <= 0 || w * h < 4) return null;
  return { x, y, w, h };
}
