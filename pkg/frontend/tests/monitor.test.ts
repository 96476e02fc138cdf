import { describe, expect, it } from "vitest";

import { JobMonitorModel, sameEventSequence } from "../src/monitor.js";
import { StreamConnection, type SourceFactory } from "../src/sse.js";
import type { JobEvent } from "../src/types.js";

function makeEvents(count: number): JobEvent[] {
  const events: JobEvent[] = [];
  let seq = 1;
  events.push(event(seq++, "status", { status: "launched" }));
  events.push(event(seq++, "status", { status: "running" }));
  for (let c = 1; c <= 3; c++) {
    events.push(event(seq++, "candidate_started", {
      candidate_id: `c000${c}`, agent: "q_learning", hyperparams: { gamma: 0.95 },
    }));
    events.push(event(seq++, "metric", {
      candidate_id: `c000${c}`, metric: "training_series", values: [c, c + 1, c + 2],
    }));
    events.push(event(seq++, "candidate_finished", {
      candidate_id: `c000${c}`, status: "ok", rank_score: c * 1.5, train_steps: 10,
    }));
    events.push(event(seq++, "metric", { metric: "progress", completed: c, total: 3 }));
  }
  while (events.length < count - 1) {
    events.push(event(seq++, "log", { message: `line ${seq}` }));
  }
  events.push(event(seq++, "status", { status: "succeeded" }));
  return events;
}

function event(seq: number, kind: JobEvent["kind"], payload: Record<string, unknown>): JobEvent {
  return { job_id: "j-1", seq, kind, payload, ts: 1000 + seq };
}

/** A stream that drops the connection after delivering a few events. */
function flakyFactory(replay: JobEvent[], dropEvery: number): SourceFactory {
  let attempts = 0;
  return (fromSeq, handlers) => {
    attempts += 1;
    let closed = false;
    queueMicrotask(() => {
      let delivered = 0;
      for (const item of replay) {
        if (closed) return;
        if (item.seq < fromSeq) continue;
        handlers.onEvent(item);
        delivered += 1;
        if (delivered >= dropEvery && item.seq < replay.length) {
          handlers.onError(); // injected disconnect mid-stream
          return;
        }
      }
      if (!closed) handlers.onEnd();
    });
    return { close: () => { closed = true; } };
  };
}

async function settle(): Promise<void> {
  // each await advances one link of the microtask chain, so be generous
  for (let i = 0; i < 2000; i++) await Promise.resolve();
}

describe("job monitor under reconnection chaos", () => {
  it("renders the same event sequence as a full replay despite disconnects", async () => {
    const replay = makeEvents(30);
    for (const dropEvery of [1, 2, 3, 5, 7]) {
      const model = new JobMonitorModel();
      const connection = new StreamConnection(
        flakyFactory(replay, dropEvery),
        {
          resumeFrom: () => model.resumeFrom(),
          onEvent: (e) => model.ingest(e),
          onLive: () => model.markLive(),
          onResuming: () => model.markResuming(),
          onEnded: () => model.markEnded(),
        },
        { baseMs: 0, schedule: (fn) => queueMicrotask(fn) },
      );
      connection.start();
      await settle();
      expect(model.connection).toBe("ended");
      expect(sameEventSequence(model.orderedEvents(), replay)).toBe(true);
    }
  });

  it("deduplicates overlapping redelivery after resume", () => {
    const model = new JobMonitorModel();
    const replay = makeEvents(10);
    for (const e of replay.slice(0, 6)) model.ingest(e);
    // a resume that overlaps already-seen seqs must not duplicate
    for (const e of replay.slice(3)) model.ingest(e);
    expect(model.orderedEvents().map((e) => e.seq)).toEqual(replay.map((e) => e.seq));
  });

  it("resume point is always last seen seq + 1", () => {
    const model = new JobMonitorModel();
    expect(model.resumeFrom()).toBe(1);
    model.ingest(event(1, "log", {}));
    model.ingest(event(2, "log", {}));
    expect(model.resumeFrom()).toBe(3);
  });

  it("events render strictly seq-ordered even if delivered out of order", () => {
    const model = new JobMonitorModel();
    model.ingest(event(3, "log", { m: 3 }));
    model.ingest(event(1, "log", { m: 1 }));
    model.ingest(event(2, "log", { m: 2 }));
    expect(model.orderedEvents().map((e) => e.seq)).toEqual([1, 2, 3]);
  });

  it("reconnect backoff grows exponentially and caps at 30s", async () => {
    const delays: number[] = [];
    const factory: SourceFactory = (_from, handlers) => {
      queueMicrotask(() => handlers.onError());
      return { close: () => {} };
    };
    const model = new JobMonitorModel();
    let scheduled = 0;
    const connection = new StreamConnection(
      factory,
      {
        resumeFrom: () => model.resumeFrom(),
        onEvent: (e) => model.ingest(e),
        onLive: () => model.markLive(),
        onResuming: () => model.markResuming(),
        onEnded: () => model.markEnded(),
      },
      {
        baseMs: 1000,
        capMs: 30_000,
        schedule: (fn, delay) => {
          delays.push(delay);
          if (scheduled++ < 8) queueMicrotask(fn);
        },
      },
    );
    connection.start();
    await settle();
    expect(delays.slice(0, 7)).toEqual([1000, 2000, 4000, 8000, 16000, 30000, 30000]);
  });
});

describe("derived monitor views", () => {
  const replay = makeEvents(30);

  function loaded(): JobMonitorModel {
    const model = new JobMonitorModel();
    for (const e of replay) model.ingest(e);
    return model;
  }

  it("candidate table sorts by score and tracks status", () => {
    const table = loaded().candidateTable();
    expect(table.map((r) => r.candidate_id)).toEqual(["c0003", "c0002", "c0001"]);
    expect(table.every((r) => r.status === "ok")).toBe(true);
  });

  it("slider views equal prefix computations", () => {
    const model = loaded();
    // at seq 5 only the first candidate has finished
    const prefix = model.candidateTable(5);
    expect(prefix).toHaveLength(1);
    expect(prefix[0].candidate_id).toBe("c0001");
    expect(prefix[0].status).toBe("ok");
    // at seq 4 it has started but not finished
    const running = model.candidateTable(4);
    expect(running[0].status).toBe("running");
    expect(model.statusAt(2)).toBe("running");
    expect(model.statusAt()).toBe("succeeded");
  });

  it("reward series keyed by candidate", () => {
    const series = loaded().rewardSeries();
    expect([...series.keys()]).toEqual(["c0001", "c0002", "c0003"]);
    expect(series.get("c0002")).toEqual([2, 3, 4]);
  });

  it("progress reflects the latest progress metric", () => {
    expect(loaded().progress()).toEqual({ completed: 3, total: 3 });
  });

  it("protocol chunks reassemble in order", () => {
    const model = new JobMonitorModel();
    model.ingest(event(1, "protocol_chunk", {
      candidate_id: "c1", chunk_index: 1, total_chunks: 2, data: "world",
    }));
    expect(model.protocolCsv("c1")).toBeNull(); // incomplete
    model.ingest(event(2, "protocol_chunk", {
      candidate_id: "c1", chunk_index: 0, total_chunks: 2, data: "hello ",
    }));
    expect(model.protocolCsv("c1")).toBe("hello world");
  });
});
