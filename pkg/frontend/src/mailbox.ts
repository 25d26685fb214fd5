// Inbound message mailbox, drained once per animation tick.
//
// Frames conflate: only the newest undrawn frame is kept, so a fast server
// can never queue frames without bound. Other messages keep order in a
// bounded queue; on overflow the oldest are dropped and counted (the view
// reports a gap rather than interpolating).

import type { FrameMsg, ServerMsg } from "./protocol.js";

export const MAX_QUEUED = 4096;

export class Mailbox {
  private latestFrame: FrameMsg | null = null;
  private queue: ServerMsg[] = [];
  droppedFrames = 0;
  droppedMessages = 0;

  push(msg: ServerMsg): void {
    if (msg.kind === "frame") {
      if (this.latestFrame !== null) this.droppedFrames++;
      this.latestFrame = msg;
      return;
    }
    if (this.queue.length >= MAX_QUEUED) {
      this.queue.shift();
      this.droppedMessages++;
    }
    this.queue.push(msg);
  }

  // Everything pending, in order, with at most one frame (the newest).
  drain(): ServerMsg[] {
    const out = this.queue;
    this.queue = [];
    if (this.latestFrame !== null) {
      out.push(this.latestFrame);
      this.latestFrame = null;
    }
    return out;
  }

  get pending(): number {
    return this.queue.length + (this.latestFrame ? 1 : 0);
  }
}
