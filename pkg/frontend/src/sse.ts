/** Server-sent-event frame parsing and a resumable stream connection.
 *
 * The controller emits one JSON event per `data:` frame, comment lines as
 * heartbeats, and `{"kind":"end_of_stream"}` when a terminal job is fully
 * delivered. Reconnects resume from the last seen seq with exponential
 * backoff capped at 30 s.
 */

import type { JobEvent } from "./types.js";

export type StreamFrame =
  | { type: "event"; event: JobEvent }
  | { type: "end" }
  | { type: "heartbeat" };

/** Incremental parser: feed raw text chunks, get complete frames back. */
export class SseParser {
  private buffer = "";

  feed(chunk: string): StreamFrame[] {
    this.buffer += chunk;
    const frames: StreamFrame[] = [];
    let index: number;
    while ((index = this.buffer.indexOf("\n\n")) >= 0) {
      const block = this.buffer.slice(0, index);
      this.buffer = this.buffer.slice(index + 2);
      for (const line of block.split("\n")) {
        if (line.startsWith(":")) {
          frames.push({ type: "heartbeat" });
        } else if (line.startsWith("data: ")) {
          const payload = JSON.parse(line.slice(6));
          if (payload.kind === "end_of_stream") {
            frames.push({ type: "end" });
          } else {
            frames.push({ type: "event", event: payload as JobEvent });
          }
        }
      }
    }
    return frames;
  }
}

export interface StreamHandlers {
  onEvent(event: JobEvent): void;
  onEnd(): void;
  onError(): void;
}

export interface StreamHandle {
  close(): void;
}

/** Opens one stream attempt from a seq; the connection drives retries. */
export type SourceFactory = (fromSeq: number, handlers: StreamHandlers) => StreamHandle;

export interface BackoffOptions {
  baseMs?: number;
  capMs?: number;
  schedule?: (fn: () => void, delayMs: number) => void;
}

export interface ConnectionDelegate {
  resumeFrom(): number;
  onEvent(event: JobEvent): void;
  onLive(): void;
  onResuming(): void;
  onEnded(): void;
}

export class StreamConnection {
  private handle: StreamHandle | null = null;
  private delay: number;
  private readonly base: number;
  private readonly cap: number;
  private readonly schedule: (fn: () => void, delayMs: number) => void;
  private stopped = false;

  constructor(
    private factory: SourceFactory,
    private delegate: ConnectionDelegate,
    options: BackoffOptions = {},
  ) {
    this.base = options.baseMs ?? 1000;
    this.delay = this.base;
    this.cap = options.capMs ?? 30_000;
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
  }

  start(): void {
    this.open();
  }

  stop(): void {
    this.stopped = true;
    this.handle?.close();
  }

  get currentDelay(): number {
    return this.delay;
  }

  private open(): void {
    if (this.stopped) return;
    this.delegate.onResuming();
    this.handle = this.factory(this.delegate.resumeFrom(), {
      onEvent: (event) => {
        this.delay = this.base;
        this.delegate.onEvent(event);
        this.delegate.onLive();
      },
      onEnd: () => {
        this.handle?.close();
        this.delegate.onEnded();
      },
      onError: () => {
        this.handle?.close();
        if (this.stopped) return;
        const wait = this.delay;
        this.delay = Math.min(this.delay * 2, this.cap);
        this.schedule(() => this.open(), wait);
      },
    });
  }
}

/** Browser EventSource adapter (the stream endpoint is unauthenticated). */
export function eventSourceFactory(base: string, jobId: string): SourceFactory {
  return (fromSeq, handlers) => {
    const source = new EventSource(`${base}/api/v1/jobs/${jobId}/events?from_seq=${fromSeq}`);
    source.onmessage = (message) => {
      const payload = JSON.parse(message.data);
      if (payload.kind === "end_of_stream") {
        handlers.onEnd();
      } else {
        handlers.onEvent(payload);
      }
    };
    source.onerror = () => handlers.onError();
    return { close: () => source.close() };
  };
}
