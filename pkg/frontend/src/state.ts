// View state and its pure reducers. Buffers are bounded: the signal trace
// keeps the last 60 seconds, the spectrogram strip the last 300 columns.
// Sequence gaps are recorded as markers; values are never interpolated
// across a gap.

import type { FrameMsg, RateMsg, Roi, RvsColMsg, ServerMsg, SignalMsg } from "./protocol.js";

export const SIGNAL_WINDOW_S = 60;
export const MAX_RVS_COLS = 300;

export interface SignalPoint {
  tS: number;
  value: number;
  gapBefore: boolean;
}

export interface RvsColumn {
  tS: number;
  mags: number[];
}

export interface ViewState {
  connection: "connecting" | "open" | "closed";
  frame: FrameMsg | null;
  roiPending: Roi | null; // drawn, not yet acknowledged
  roiActive: Roi | null; // acknowledged by the server
  signal: SignalPoint[];
  lastRate: RateMsg | null;
  rvs: RvsColumn[];
  rangeLocked: boolean;
  ended: Set<string>;
  lastError: string | null;
  expectedSeq: Map<string, number>;
}

export function initialState(): ViewState {
  return {
    connection: "connecting",
    frame: null,
    roiPending: null,
    roiActive: null,
    signal: [],
    lastRate: null,
    rvs: [],
    rangeLocked: false,
    ended: new Set(),
    lastError: null,
    expectedSeq: new Map(),
  };
}

function gapCheck(state: ViewState, channel: string, seq: number): boolean {
  const expected = state.expectedSeq.get(channel) ?? 0;
  state.expectedSeq.set(channel, seq + 1);
  return seq > expected;
}

export function applyMessage(state: ViewState, msg: ServerMsg): ViewState {
  switch (msg.kind) {
    case "frame":
      gapCheck(state, "frame", msg.seq);
      return { ...state, frame: msg };
    case "signal":
      return applySignal(state, msg);
    case "rate":
      gapCheck(state, "rate", msg.seq);
      return { ...state, lastRate: msg };
    case "rvs_col":
      return applyRvsCol(state, msg);
    case "roi_ack":
      return {
        ...state,
        roiActive: { x: msg.x, y: msg.y, w: msg.w, h: msg.h },
        roiPending: null,
        // a new region restarts the recovered signal downstream
        signal: [],
        rvs: [],
        lastRate: null,
      };
    case "error":
      return { ...state, lastError: `${msg.code}: ${msg.detail}` };
    case "end": {
      const ended = new Set(state.ended);
      ended.add(msg.channel);
      return { ...state, ended };
    }
  }
}

function applySignal(state: ViewState, msg: SignalMsg): ViewState {
  const gap = gapCheck(state, "signal", msg.seq);
  const cutoff = msg.tS - SIGNAL_WINDOW_S;
  const kept = state.signal.filter((p) => p.tS >= cutoff);
  kept.push({ tS: msg.tS, value: msg.value, gapBefore: gap });
  return { ...state, signal: kept };
}

function applyRvsCol(state: ViewState, msg: RvsColMsg): ViewState {
  gapCheck(state, "rvs_col", msg.seq);
  const cols = state.rvs.length >= MAX_RVS_COLS
    ? state.rvs.slice(state.rvs.length - MAX_RVS_COLS + 1)
    : state.rvs.slice();
  cols.push({ tS: msg.tS, mags: msg.mags });
  return { ...state, rvs: cols };
}
