"""Replay server: plays a sequence on its media clock and streams it.

One driver task owns the media clock, the single active ROI, and the
estimator state; client messages are serialized into it through a queue, so
no estimation ever runs concurrently with an ROI change. Clients are
independent consumers fed from per-connection outbound queues.

Wire protocol (WebSocket at ``/ws``; the static UI is served at ``/``):

* client -> server, JSON text: ``set_roi`` (x, y, w, h), ``play``, ``pause``,
  ``seek`` (t_s).
* server -> client: frames as binary messages, 16-byte header
  ``u32 seq | u64 timestamp_us | u16 width | u16 height`` (little-endian)
  followed by width*height u16 centikelvin cells; everything else as JSON
  text (``signal``, ``rate``, ``rvs_col``, ``roi_ack``, ``error``, ``end``).

Per-channel sequence numbers are gapless; the ``end`` message closes each
data channel and carries that channel's next sequence number. ``roi_ack`` is
broadcast to every client so all UIs converge on the active ROI; ``error``
goes only to the offending client with a per-client counter. Frames stream
with or without an ROI; signal, rate, and spectrogram messages start once a
client sets one. The server starts paused so a client can place the ROI
before any media time passes; speed 0 replays as fast as possible.
"""

from __future__ import annotations

import asyncio
import json
import socket
import struct
import sys
from bisect import bisect_left
from contextlib import asynccontextmanager, suppress
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .errors import RoiBoundsError
from .pipeline import PipelineConfig
from .streaming import StreamingEstimator
from .thermal import Roi, ThermalSequence, emissivity_correct
from .tseq import CELL_INVALID

FRAME_HEADER = struct.Struct("<IQHH")
DATA_CHANNELS = ("frame", "signal", "rate", "rvs_col")

_PLACEHOLDER = """<!doctype html>
<html><head><title>thermoresp replay</title></head>
<body><h1>thermoresp replay server</h1>
<p>No UI bundle was found. Build the frontend (see README) and restart with
<code>--ui-dir</code>, or talk to the WebSocket endpoint at <code>/ws</code>
directly.</p></body></html>"""


class _Client:
    __slots__ = ("cid", "queue", "errors_sent")

    def __init__(self, cid: int):
        self.cid = cid
        self.queue: asyncio.Queue = asyncio.Queue()
        self.errors_sent = 0


class ReplayDriver:
    """Single producer of media events for one loaded sequence."""

    def __init__(self, seq: ThermalSequence, cfg: PipelineConfig):
        self.seq = seq
        self.cfg = cfg
        self.control: asyncio.Queue = asyncio.Queue()
        self.clients: dict[int, _Client] = {}
        self._next_cid = 0
        self.playing = False
        self.pos = 0
        self.roi: Roi | None = cfg.roi
        self.estimator: StreamingEstimator | None = None
        if self.roi is not None:
            self.roi.check_within(seq.meta.width, seq.meta.height)
            self.estimator = self._new_estimator()
        self.seqnos = {ch: 0 for ch in DATA_CHANNELS}
        self.ack_seq = 0
        self.media_t = seq.frames[0].timestamp if seq.frames else 0.0
        self._emissivity = (cfg.emissivity if cfg.emissivity is not None
                            else seq.meta.emissivity)
        self._anchor_wall = 0.0
        self._anchor_media = 0.0

    def _new_estimator(self) -> StreamingEstimator:
        return StreamingEstimator(
            roi=self.roi, voxel=self.cfg.voxel, band=self.cfg.band, fs=self.cfg.fs,
            rate_window_s=self.cfg.rate_window_s, rate_hop_s=self.cfg.rate_hop_s,
            rvs=self.cfg.rvs,
        )

    # -- client management (event-loop only) -------------------------------

    def register(self) -> _Client:
        client = _Client(self._next_cid)
        self._next_cid += 1
        self.clients[client.cid] = client
        return client

    def unregister(self, cid: int) -> None:
        self.clients.pop(cid, None)

    # -- outbound ----------------------------------------------------------

    def _broadcast(self, payload) -> None:
        for c in self.clients.values():
            c.queue.put_nowait(payload)

    def _send_json(self, channel: str, msg: dict) -> None:
        msg["seq"] = self.seqnos[channel]
        self.seqnos[channel] += 1
        self._broadcast(json.dumps(msg))

    def _send_error(self, cid: int, code: str, detail: str) -> None:
        client = self.clients.get(cid)
        if client is None:
            return
        payload = json.dumps({
            "type": "error", "code": code, "detail": detail,
            "seq": client.errors_sent, "t_s": self.media_t,
        })
        client.errors_sent += 1
        client.queue.put_nowait(payload)

    # -- control -------------------------------------------------------------

    def handle_control(self, cid: int, text: str) -> None:
        try:
            msg = json.loads(text)
            if not isinstance(msg, dict):
                raise ValueError("message must be a JSON object")
        except ValueError as exc:
            self._send_error(cid, "bad_message", f"unparseable message: {exc}")
            return
        mtype = msg.get("type")
        if mtype == "set_roi":
            self._handle_set_roi(cid, msg)
        elif mtype == "play":
            self._handle_play()
        elif mtype == "pause":
            self.playing = False
        elif mtype == "seek":
            self._handle_seek(cid, msg)
        else:
            self._send_error(cid, "unknown_type", f"unknown message type {mtype!r}")

    def _handle_set_roi(self, cid: int, msg: dict) -> None:
        try:
            roi = Roi(msg["x"], msg["y"], msg["w"], msg["h"])
        except (KeyError, TypeError, ValueError) as exc:
            self._send_error(cid, "roi_invalid", str(exc))
            return
        try:
            roi.check_within(self.seq.meta.width, self.seq.meta.height)
        except RoiBoundsError as exc:
            self._send_error(cid, "roi_out_of_bounds", str(exc))
            return
        self.roi = roi
        self.estimator = self._new_estimator()  # ROI change resets the estimator
        self.ack_seq += 1
        self._broadcast(json.dumps({
            "type": "roi_ack", "x": roi.x, "y": roi.y, "w": roi.w, "h": roi.h,
            "seq": self.ack_seq - 1, "t_s": self.media_t,
        }))

    def _handle_play(self) -> None:
        if self.pos >= len(self.seq.frames):
            return  # nothing left; seek back first
        self.playing = True
        self._anchor_wall = asyncio.get_running_loop().time()
        self._anchor_media = self.seq.frames[self.pos].timestamp

    def _handle_seek(self, cid: int, msg: dict) -> None:
        t = msg.get("t_s")
        if not isinstance(t, (int, float)) or not np.isfinite(t):
            self._send_error(cid, "bad_seek", f"seek needs a finite t_s, got {t!r}")
            return
        times = [fr.timestamp for fr in self.seq.frames]
        self.pos = bisect_left(times, float(t))
        self.media_t = float(t)
        if self.roi is not None:
            self.estimator = self._new_estimator()  # discontinuity: reset
        if self.playing:
            self._handle_play()

    # -- media loop ----------------------------------------------------------

    async def run(self) -> None:
        loop = asyncio.get_running_loop()
        while True:
            while not self.control.empty():
                cid, text = self.control.get_nowait()
                self.handle_control(cid, text)
            if not self.playing:
                cid, text = await self.control.get()
                self.handle_control(cid, text)
                continue
            if self.pos >= len(self.seq.frames):
                self._finish()
                continue
            frame = self.seq.frames[self.pos]
            if self.cfg.speed > 0:
                target = self._anchor_wall + (
                    (frame.timestamp - self._anchor_media) / self.cfg.speed
                )
                delay = target - loop.time()
                if delay > 0:
                    try:
                        cid, text = await asyncio.wait_for(
                            self.control.get(), timeout=delay
                        )
                        self.handle_control(cid, text)
                        continue  # state may have changed; re-evaluate
                    except asyncio.TimeoutError:
                        pass
            else:
                await asyncio.sleep(0)  # let sender tasks drain
            self._emit_frame(frame)
            self.pos += 1

    def _emit_frame(self, frame) -> None:
        corrected = emissivity_correct(frame, self._emissivity)
        ts_us = int(np.floor(frame.timestamp * 1e6 + 0.5))
        cells = np.full(corrected.pixels.shape, CELL_INVALID, dtype="<u2")
        valid = corrected.valid_mask()
        cells[valid] = np.floor(corrected.pixels[valid] * 100.0 + 0.5).astype("<u2")
        head = FRAME_HEADER.pack(
            self.seqnos["frame"], ts_us, frame.width, frame.height
        )
        self.seqnos["frame"] += 1
        self.media_t = frame.timestamp
        self._broadcast(head + cells.tobytes())

        if self.estimator is None:
            return
        events = self.estimator.push_frame(corrected)
        for t, v in events.signals:
            self._send_json("signal", {"type": "signal", "t_s": t, "value": v})
        for est in events.rates:
            self._send_json("rate", {
                "type": "rate", "t_center_s": est.t_center,
                "bpm": est.bpm, "confidence": est.confidence,
            })
        freqs = self.estimator.rvs_freqs_hz
        for col in events.rvs_columns:
            self._send_json("rvs_col", {
                "type": "rvs_col", "t_s": col.t_center,
                "f_lo_hz": float(freqs[0]), "f_hi_hz": float(freqs[-1]),
                "mags": [float(v) for v in col.normalized],
            })

    def _finish(self) -> None:
        for ch in DATA_CHANNELS:
            self._send_json(ch, {"type": "end", "channel": ch, "t_s": self.media_t})
        self.playing = False


def create_app(seq: ThermalSequence, cfg: PipelineConfig,
               ui_dir: str | None = None) -> FastAPI:
    driver = ReplayDriver(seq, cfg)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(driver.run())
        try:
            yield
        finally:
            task.cancel()
            with suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)
    app.state.driver = driver

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        client = driver.register()

        async def sender():
            while True:
                item = await client.queue.get()
                if isinstance(item, bytes):
                    await ws.send_bytes(item)
                else:
                    await ws.send_text(item)

        sender_task = asyncio.create_task(sender())
        try:
            while True:
                msg = await ws.receive()
                if msg["type"] == "websocket.disconnect":
                    break
                if msg.get("text") is not None:
                    driver.control.put_nowait((client.cid, msg["text"]))
                elif msg.get("bytes") is not None:
                    driver._send_error(client.cid, "bad_message",
                                       "binary client messages are not supported")
        finally:
            sender_task.cancel()
            with suppress(asyncio.CancelledError):
                await sender_task
            driver.unregister(client.cid)

    resolved = _resolve_ui_dir(ui_dir)
    if resolved is not None:
        app.mount("/", StaticFiles(directory=resolved, html=True), name="ui")
    else:
        @app.get("/")
        async def index():
            return HTMLResponse(_PLACEHOLDER)

    return app


def _resolve_ui_dir(ui_dir: str | None) -> str | None:
    if ui_dir:
        if not Path(ui_dir).is_dir():
            raise ValueError(f"--ui-dir {ui_dir} is not a directory")
        return ui_dir
    candidate = Path("frontend") / "dist"
    if candidate.is_dir():
        return str(candidate)
    return None


def run_server(seq: ThermalSequence, cfg: PipelineConfig,
               host: str = "127.0.0.1", ui_dir: str | None = None) -> int:
    """Run uvicorn on cfg.port; returns a process exit code."""
    import uvicorn

    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.bind((host, cfg.port))
        probe.close()
    except OSError as exc:
        print(f"processing error: cannot bind {host}:{cfg.port}: {exc}",
              file=sys.stderr)
        return 4
    app = create_app(seq, cfg, ui_dir=ui_dir)
    print(f"serving {len(seq)} frames on http://{host}:{cfg.port}/ "
          f"(WebSocket at /ws, speed x{cfg.speed:g})")
    uvicorn.run(app, host=host, port=cfg.port, log_level="warning")
    return 0
