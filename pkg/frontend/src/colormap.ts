// Perceptually ordered colormap (dark violet -> teal -> yellow) built from a
// few anchor stops, plus the reserved color for invalid cells.

type Rgb = [number, number, number];

const STOPS: Array<[number, Rgb]> = [
  [0.0, [68, 1, 84]],
  [0.25, [59, 82, 139]],
  [0.5, [33, 145, 140]],
  [0.75, [94, 201, 98]],
  [1.0, [253, 231, 37]],
];

export const INVALID_RGB: Rgb = [255, 0, 255];

function lerp(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

export function buildLut(size = 256): Uint8Array {
  const lut = new Uint8Array(size * 3);
  for (let i = 0; i < size; i++) {
    const x = size === 1 ? 0 : i / (size - 1);
    let j = 0;
    while (j < STOPS.length - 2 && x > STOPS[j + 1][0]) j++;
    const [x0, c0] = STOPS[j];
    const [x1, c1] = STOPS[j + 1];
    const t = x1 === x0 ? 0 : (x - x0) / (x1 - x0);
    lut[3 * i] = lerp(c0[0], c1[0], t);
    lut[3 * i + 1] = lerp(c0[1], c1[1], t);
    lut[3 * i + 2] = lerp(c0[2], c1[2], t);
  }
  return lut;
}

export const LUT = buildLut();
