// Browser wiring: socket -> mailbox -> state -> canvases, one drain per
// animation tick. Rendering never blocks message receipt.

import { autoRange, renderHeatmap, type ColorRange } from "./heatmap.js";
import { Mailbox } from "./mailbox.js";
import {
  decodeFrame,
  makePlay,
  makeSetRoi,
  parseServerText,
  type Roi,
} from "./protocol.js";
import { dragToRoi } from "./roi.js";
import {
  formatConfidence,
  formatRate,
  rvsColumnPixels,
  signalSegments,
} from "./panels.js";
import { applyMessage, initialState, SIGNAL_WINDOW_S, type ViewState } from "./state.js";

const HEATMAP_TARGET_W = 640;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

export function startApp(): void {
  const heatCanvas = el<HTMLCanvasElement>("heatmap");
  const traceCanvas = el<HTMLCanvasElement>("trace");
  const rvsCanvas = el<HTMLCanvasElement>("rvs");
  const rateEl = el<HTMLElement>("rate");
  const confEl = el<HTMLElement>("confidence");
  const statusEl = el<HTMLElement>("status");
  const hintEl = el<HTMLElement>("hint");
  const lockBox = el<HTMLInputElement>("lock-range");

  let state: ViewState = initialState();
  const mailbox = new Mailbox();
  let scale = 4;
  let lockedRange: ColorRange | null = null;
  let drag: { x0: number; y0: number; x1: number; y1: number } | null = null;

  const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
  const ws = new WebSocket(wsUrl);
  ws.binaryType = "arraybuffer";

  ws.onopen = () => {
    state = { ...state, connection: "open" };
    ws.send(makePlay());
  };
  ws.onclose = () => {
    state = { ...state, connection: "closed" };
  };
  ws.onmessage = (ev: MessageEvent) => {
    try {
      if (ev.data instanceof ArrayBuffer) {
        mailbox.push(decodeFrame(ev.data));
      } else {
        mailbox.push(parseServerText(String(ev.data)));
      }
    } catch (err) {
      state = { ...state, lastError: String(err) };
    }
  };

  function canvasPos(ev: PointerEvent): [number, number] {
    const rect = heatCanvas.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  }

  heatCanvas.addEventListener("pointerdown", (ev) => {
    const [x, y] = canvasPos(ev);
    drag = { x0: x, y0: y, x1: x, y1: y };
    heatCanvas.setPointerCapture(ev.pointerId);
  });
  heatCanvas.addEventListener("pointermove", (ev) => {
    if (!drag) return;
    [drag.x1, drag.y1] = canvasPos(ev);
  });
  heatCanvas.addEventListener("pointerup", (ev) => {
    if (!drag || !state.frame) {
      drag = null;
      return;
    }
    [drag.x1, drag.y1] = canvasPos(ev);
    const roi = dragToRoi(
      drag.x0, drag.y0, drag.x1, drag.y1,
      scale, state.frame.width, state.frame.height,
    );
    drag = null;
    if (!roi) {
      hintEl.textContent = "region too small: drag a box of at least 2x2 pixels";
      return;
    }
    const msg = makeSetRoi(roi);
    if (msg && ws.readyState === WebSocket.OPEN) {
      state = { ...state, roiPending: roi };
      ws.send(msg);
    }
  });

  function drawHeatmap(): void {
    const frame = state.frame;
    if (!frame) return;
    scale = Math.max(1, Math.floor(HEATMAP_TARGET_W / frame.width));
    const w = frame.width * scale;
    const h = frame.height * scale;
    if (heatCanvas.width !== w || heatCanvas.height !== h) {
      heatCanvas.width = w;
      heatCanvas.height = h;
    }
    if (lockBox.checked) {
      lockedRange = lockedRange ?? autoRange(frame);
    } else {
      lockedRange = null;
    }
    const range = lockedRange ?? autoRange(frame);
    const rgba = renderHeatmap(frame, range, scale);
    const ctx = heatCanvas.getContext("2d")!;
    const img = ctx.createImageData(w, h);
    img.data.set(rgba);
    ctx.putImageData(img, 0, 0);
    drawRoiOverlay(ctx);
  }

  function drawRoiOverlay(ctx: CanvasRenderingContext2D): void {
    const style = (roi: Roi, dashed: boolean, color: string) => {
      ctx.save();
      ctx.strokeStyle = color;
      ctx.lineWidth = 2;
      ctx.setLineDash(dashed ? [6, 4] : []);
      ctx.strokeRect(roi.x * scale, roi.y * scale, roi.w * scale, roi.h * scale);
      ctx.restore();
    };
    if (state.roiActive) style(state.roiActive, false, "#00e5ff");
    if (state.roiPending) style(state.roiPending, true, "#ffffff");
    if (drag) {
      ctx.save();
      ctx.strokeStyle = "#ffffff";
      ctx.setLineDash([4, 3]);
      ctx.strokeRect(
        Math.min(drag.x0, drag.x1), Math.min(drag.y0, drag.y1),
        Math.abs(drag.x1 - drag.x0), Math.abs(drag.y1 - drag.y0),
      );
      ctx.restore();
    }
  }

  function drawTrace(): void {
    const ctx = traceCanvas.getContext("2d")!;
    ctx.fillStyle = "#10141a";
    ctx.fillRect(0, 0, traceCanvas.width, traceCanvas.height);
    if (!state.roiActive) return;
    ctx.strokeStyle = "#6fe3a0";
    ctx.lineWidth = 1.5;
    for (const seg of signalSegments(
      state.signal, traceCanvas.width, traceCanvas.height, SIGNAL_WINDOW_S,
    )) {
      ctx.beginPath();
      seg.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
      ctx.stroke();
    }
  }

  function drawRvs(): void {
    const cols = state.rvs;
    if (cols.length === 0) return;
    const rows = cols[0].mags.length;
    if (rvsCanvas.width !== cols.length || rvsCanvas.height !== rows) {
      rvsCanvas.width = cols.length;
      rvsCanvas.height = rows;
    }
    const img = new ImageData(cols.length, rows);
    for (let c = 0; c < cols.length; c++) {
      const px = rvsColumnPixels(cols[c].mags);
      for (let r = 0; r < rows; r++) {
        const o = (r * cols.length + c) * 4;
        img.data[o] = img.data[o + 1] = img.data[o + 2] = px[r];
        img.data[o + 3] = 255;
      }
    }
    rvsCanvas.getContext("2d")!.putImageData(img, 0, 0);
  }

  function tick(): void {
    for (const msg of mailbox.drain()) {
      state = applyMessage(state, msg);
    }
    drawHeatmap();
    drawTrace();
    drawRvs();
    rateEl.textContent = state.lastRate ? formatRate(state.lastRate.bpm) : "-- bpm";
    confEl.textContent = state.lastRate
      ? formatConfidence(state.lastRate.confidence) : "";
    statusEl.textContent =
      state.connection === "open"
        ? (state.lastError ?? "connected")
        : state.connection;
    if (!state.roiActive) {
      hintEl.textContent = "select a region over the nostrils";
    } else if (!state.lastRate) {
      hintEl.textContent = "estimating: the first rate needs 30 s of signal";
    } else {
      hintEl.textContent = "";
    }
    requestAnimationFrame(tick);
  }

  requestAnimationFrame(tick);
}
