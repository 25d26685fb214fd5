// Wire protocol: binary frame decoding, JSON message parsing, and the
// schema-checked client messages. Transport-agnostic so it is testable
// without a browser or a socket.

export interface FrameMsg {
  kind: "frame";
  seq: number;
  tUs: number;
  width: number;
  height: number;
  cells: Uint16Array; // centikelvin, 0 = invalid
}

export interface SignalMsg {
  kind: "signal";
  seq: number;
  tS: number;
  value: number;
}

export interface RateMsg {
  kind: "rate";
  seq: number;
  tCenterS: number;
  bpm: number;
  confidence: number;
}

export interface RvsColMsg {
  kind: "rvs_col";
  seq: number;
  tS: number;
  fLoHz: number;
  fHiHz: number;
  mags: number[]; // low -> high frequency, in [0, 1]
}

export interface RoiAckMsg {
  kind: "roi_ack";
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface ErrorMsg {
  kind: "error";
  code: string;
  detail: string;
}

export interface EndMsg {
  kind: "end";
  channel: string;
  seq: number;
}

export type ServerMsg =
  | FrameMsg
  | SignalMsg
  | RateMsg
  | RvsColMsg
  | RoiAckMsg
  | ErrorMsg
  | EndMsg;

export class ProtocolError extends Error {}

const FRAME_HEADER_BYTES = 16;

export function decodeFrame(buf: ArrayBuffer): FrameMsg {
  if (buf.byteLength < FRAME_HEADER_BYTES) {
    throw new ProtocolError(`frame needs ${FRAME_HEADER_BYTES} header bytes, got ${buf.byteLength}`);
  }
  const dv = new DataView(buf);
  const seq = dv.getUint32(0, true);
  const tUs = Number(dv.getBigUint64(4, true));
  const width = dv.getUint16(12, true);
  const height = dv.getUint16(14, true);
  const expected = FRAME_HEADER_BYTES + 2 * width * height;
  if (buf.byteLength !== expected) {
    throw new ProtocolError(`${width}x${height} frame needs ${expected} bytes, got ${buf.byteLength}`);
  }
  const cells = new Uint16Array(buf, FRAME_HEADER_BYTES, width * height);
  return { kind: "frame", seq, tUs, width, height, cells };
}

export function parseServerText(text: string): ServerMsg {
  let raw: Record<string, unknown>;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new ProtocolError(`unparseable server message: ${err}`);
  }
  const num = (k: string): number => {
    const v = raw[k];
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new ProtocolError(`field ${k} must be a finite number, got ${v}`);
    }
    return v;
  };
  switch (raw.type) {
    case "signal":
      return { kind: "signal", seq: num("seq"), tS: num("t_s"), value: num("value") };
    case "rate":
      return {
        kind: "rate", seq: num("seq"), tCenterS: num("t_center_s"),
        bpm: num("bpm"), confidence: num("confidence"),
      };
    case "rvs_col": {
      const mags = raw.mags;
      if (!Array.isArray(mags) || mags.some((m) => typeof m !== "number")) {
        throw new ProtocolError("rvs_col.mags must be a number array");
      }
      return {
        kind: "rvs_col", seq: num("seq"), tS: num("t_s"),
        fLoHz: num("f_lo_hz"), fHiHz: num("f_hi_hz"), mags: mags as number[],
      };
    }
    case "roi_ack":
      return { kind: "roi_ack", x: num("x"), y: num("y"), w: num("w"), h: num("h") };
    case "error":
      return {
        kind: "error",
        code: String(raw.code ?? "unknown"),
        detail: String(raw.detail ?? ""),
      };
    case "end":
      return { kind: "end", channel: String(raw.channel ?? ""), seq: num("seq") };
    default:
      throw new ProtocolError(`unknown server message type ${String(raw.type)}`);
  }
}

export interface Roi {
  x: number;
  y: number;
  w: number;
  h: number;
}

// The server refuses degenerate regions; never emit one.
export function isValidRoi(roi: Roi): boolean {
  return (
    Number.isInteger(roi.x) && Number.isInteger(roi.y) &&
    Number.isInteger(roi.w) && Number.isInteger(roi.h) &&
    roi.x >= 0 && roi.y >= 0 && roi.w > 0 && roi.h > 0 && roi.w * roi.h >= 4
  );
}

export function makeSetRoi(roi: Roi): string | null {
  if (!isValidRoi(roi)) return null;
  return JSON.stringify({ type: "set_roi", x: roi.x, y: roi.y, w: roi.w, h: roi.h });
}

export function makePlay(): string {
  return JSON.stringify({ type: "play" });
}

export function makePause(): string {
  return JSON.stringify({ type: "pause" });
}

export function makeSeek(tS: number): string {
  return JSON.stringify({ type: "seek", t_s: tS });
}
