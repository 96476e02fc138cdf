/** Job monitor view model: live event buffer keyed by seq.
 *
 * Rendered views always derive from the seq-ordered buffer, so duplicated
 * or out-of-order delivery after a reconnect cannot corrupt the display,
 * and the replay slider is just a prefix computation.
 */

import type { CandidateDoc, JobEvent } from "./types.js";

export type ConnectionState = "live" | "resuming" | "ended";

export interface CandidateRow {
  candidate_id: string;
  agent: string;
  hyperparams: Record<string, number>;
  status: "running" | "ok" | "failed";
  rank_score: number | null;
}

export class JobMonitorModel {
  private buffer = new Map<number, JobEvent>();
  connection: ConnectionState = "resuming";
  lastSeq = 0;

  ingest(event: JobEvent): boolean {
    if (this.buffer.has(event.seq)) return false;
    this.buffer.set(event.seq, event);
    if (event.seq > this.lastSeq) this.lastSeq = event.seq;
    return true;
  }

  resumeFrom(): number {
    return this.lastSeq + 1;
  }

  markLive(): void {
    if (this.connection !== "ended") this.connection = "live";
  }

  markResuming(): void {
    if (this.connection !== "ended") this.connection = "resuming";
  }

  markEnded(): void {
    this.connection = "ended";
  }

  /** All buffered events in strict seq order (optionally a prefix). */
  orderedEvents(uptoSeq?: number): JobEvent[] {
    const limit = uptoSeq ?? this.lastSeq;
    const out: JobEvent[] = [];
    const seqs = [...this.buffer.keys()].sort((a, b) => a - b);
    for (const seq of seqs) {
      if (seq > limit) break;
      out.push(this.buffer.get(seq)!);
    }
    return out;
  }

  /** Latest status payload at or before a seq. */
  statusAt(uptoSeq?: number): string {
    let status = "created";
    for (const event of this.orderedEvents(uptoSeq)) {
      if (event.kind === "status") status = String(event.payload.status);
    }
    return status;
  }

  /** Per-candidate training reward series from metric events. */
  rewardSeries(uptoSeq?: number): Map<string, number[]> {
    const series = new Map<string, number[]>();
    for (const event of this.orderedEvents(uptoSeq)) {
      if (event.kind !== "metric" || event.payload.metric !== "training_series") continue;
      const cid = String(event.payload.candidate_id);
      const values = (event.payload.values as number[]) ?? [];
      series.set(cid, [...(series.get(cid) ?? []), ...values]);
    }
    return series;
  }

  /** Leaderboard rows derived from candidate_started/finished events. */
  candidateTable(uptoSeq?: number): CandidateRow[] {
    const rows = new Map<string, CandidateRow>();
    for (const event of this.orderedEvents(uptoSeq)) {
      if (event.kind === "candidate_started") {
        const cid = String(event.payload.candidate_id);
        rows.set(cid, {
          candidate_id: cid,
          agent: String(event.payload.agent),
          hyperparams: (event.payload.hyperparams as Record<string, number>) ?? {},
          status: "running",
          rank_score: null,
        });
      } else if (event.kind === "candidate_finished") {
        const cid = String(event.payload.candidate_id);
        const row = rows.get(cid);
        if (!row) continue;
        row.status = event.payload.status === "ok" ? "ok" : "failed";
        row.rank_score = (event.payload.rank_score as number | null) ?? null;
      }
    }
    return [...rows.values()].sort((a, b) => {
      const scoreA = a.rank_score ?? Number.NEGATIVE_INFINITY;
      const scoreB = b.rank_score ?? Number.NEGATIVE_INFINITY;
      if (scoreA !== scoreB) return scoreB - scoreA;
      return a.candidate_id.localeCompare(b.candidate_id);
    });
  }

  progress(uptoSeq?: number): { completed: number; total: number } | null {
    let latest: { completed: number; total: number } | null = null;
    for (const event of this.orderedEvents(uptoSeq)) {
      if (event.kind === "metric" && event.payload.metric === "progress") {
        latest = {
          completed: Number(event.payload.completed),
          total: Number(event.payload.total),
        };
      }
    }
    return latest;
  }

  /** Reassembled protocol CSV per candidate from protocol_chunk events. */
  protocolCsv(candidateId: string, uptoSeq?: number): string | null {
    const chunks = new Map<number, string>();
    let total: number | null = null;
    for (const event of this.orderedEvents(uptoSeq)) {
      if (event.kind !== "protocol_chunk") continue;
      if (String(event.payload.candidate_id) !== candidateId) continue;
      chunks.set(Number(event.payload.chunk_index), String(event.payload.data));
      total = Number(event.payload.total_chunks);
    }
    if (total === null || chunks.size !== total) return null;
    return [...chunks.keys()]
      .sort((a, b) => a - b)
      .map((index) => chunks.get(index)!)
      .join("");
  }
}

/** Convenience check used by tests and the view: buffer vs full replay. */
export function sameEventSequence(rendered: JobEvent[], replay: JobEvent[]): boolean {
  if (rendered.length !== replay.length) return false;
  return rendered.every(
    (event, index) =>
      event.seq === replay[index].seq &&
      event.kind === replay[index].kind &&
      JSON.stringify(event.payload) === JSON.stringify(replay[index].payload),
  );
}
