// Pure helpers behind the live panels: rate formatting, the scrolling
// signal polyline, and spectrogram column pixels.

import type { SignalPoint } from "./state.js";

export function formatRate(bpm: number): string {
  return `${bpm.toFixed(1)} bpm`;
}

export function formatConfidence(confidence: number): string {
  return `${Math.round(confidence * 100)}%`;
}

// Grayscale bytes for one spectrogram column, top row = highest frequency.
// Matches the server-side image rule: round(255 * magnitude), halves up.
export function rvsColumnPixels(mags: number[]): Uint8Array {
  const out = new Uint8Array(mags.length);
  for (let i = 0; i < mags.length; i++) {
    let m = mags[i];
    if (m < 0) m = 0;
    if (m > 1) m = 1;
    out[mags.length - 1 - i] = Math.floor(255 * m + 0.5);
  }
  return out;
}

export interface Segment {
  points: Array<[number, number]>;
}

// Polyline segments for the rolling signal trace. The x axis maps the last
// windowS seconds to [0, width); segments break at sequence gaps.
export function signalSegments(
  signal: SignalPoint[], width: number, height: number, windowS: number,
): Segment[] {
  if (signal.length === 0) return [];
  const tEnd = signal[signal.length - 1].tS;
  const t0 = tEnd - windowS;
  let lo = Infinity;
  let hi = -Infinity;
  for (const p of signal) {
    if (p.value < lo) lo = p.value;
    if (p.value > hi) hi = p.value;
  }
  const span = hi > lo ? hi - lo : 1;

  const segments: Segment[] = [];
  let current: Array<[number, number]> = [];
  for (const p of signal) {
    if (p.gapBefore && current.length > 0) {
      segments.push({ points: current });
      current = [];
    }
    const x = ((p.tS - t0) / windowS) * width;
    const y = height - ((p.value - lo) / span) * height;
    current.push([x, y]);
  }
  if (current.length > 0) segments.push({ points: current });
  return segments;
}
