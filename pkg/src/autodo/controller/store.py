"""Embedded transactional store for the controller.

A single sqlite database holds projects, gyms, configs, jobs, the
append-only event log, results, and published catalog templates. Event
sequence numbers are allocated inside the append transaction, so they stay
dense (1..N per job) no matter how many producers append concurrently.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import time

TERMINAL_STATUSES = ("succeeded", "failed", "cancelled")

_SCHEMA = """
CREATE TABLE IF NOT EXISTS projects (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    members TEXT NOT NULL,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS gyms (
    id TEXT PRIMARY KEY,
    project_id TEXT NOT NULL,
    name TEXT NOT NULL,
    document TEXT NOT NULL,
    version INTEGER NOT NULL DEFAULT 1,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS configs (
    id TEXT PRIMARY KEY,
    owner TEXT NOT NULL,
    project_id TEXT,
    shared INTEGER NOT NULL,
    document TEXT NOT NULL,
    version INTEGER NOT NULL DEFAULT 1,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS jobs (
    id TEXT PRIMARY KEY,
    project_id TEXT NOT NULL,
    gym_id TEXT NOT NULL,
    config_id TEXT NOT NULL,
    status TEXT NOT NULL,
    cluster TEXT NOT NULL,
    api_token TEXT NOT NULL,
    created_at REAL NOT NULL,
    result_ref TEXT
);
CREATE TABLE IF NOT EXISTS events (
    job_id TEXT NOT NULL,
    seq INTEGER NOT NULL,
    kind TEXT NOT NULL,
    payload TEXT NOT NULL,
    ts REAL NOT NULL,
    PRIMARY KEY (job_id, seq)
);
CREATE TABLE IF NOT EXISTS results (
    job_id TEXT PRIMARY KEY,
    document TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS templates (
    id TEXT PRIMARY KEY,
    document TEXT NOT NULL
);
"""


def event_frame(job_id: str, seq: int, kind: str, payload: dict, ts: float) -> str:
    """Canonical JSON for one event; replays are byte-identical by design."""
    return json.dumps(
        {"job_id": job_id, "seq": seq, "kind": kind, "payload": payload, "ts": ts},
        sort_keys=True,
        separators=(",", ":"),
    )


class Store:
    def __init__(self, path: str = ":memory:"):
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.executescript(_SCHEMA)
        self._conn.commit()
        self._lock = threading.RLock()

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # --- projects ---------------------------------------------------------

    def insert_project(self, project_id: str, name: str, members: list[str]) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO projects VALUES (?, ?, ?, ?)",
                (project_id, name, json.dumps(members), time.time()),
            )
            self._conn.commit()

    def project(self, project_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, name, members, created_at FROM projects WHERE id = ?",
                (project_id,),
            ).fetchone()
        return _project_row(row) if row else None

    def projects(self) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, name, members, created_at FROM projects ORDER BY created_at"
            ).fetchall()
        return [_project_row(r) for r in rows]

    # --- gyms ---------------------------------------------------------------

    def insert_gym(self, gym_id: str, project_id: str, name: str, document: dict) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO gyms VALUES (?, ?, ?, ?, 1, ?)",
                (gym_id, project_id, name, json.dumps(document), time.time()),
            )
            self._conn.commit()

    def gym(self, gym_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, project_id, name, document, version, created_at FROM gyms WHERE id = ?",
                (gym_id,),
            ).fetchone()
        if not row:
            return None
        return {
            "id": row[0],
            "project_id": row[1],
            "name": row[2],
            "document": json.loads(row[3]),
            "version": row[4],
            "created_at": row[5],
        }

    def gyms_in(self, project_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, name, version, created_at FROM gyms WHERE project_id = ?"
                " ORDER BY created_at",
                (project_id,),
            ).fetchall()
        return [
            {"id": r[0], "name": r[1], "version": r[2], "created_at": r[3]} for r in rows
        ]

    # --- configs -------------------------------------------------------------

    def insert_config(
        self, config_id: str, owner: str, project_id: str | None, shared: bool, document: dict
    ) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO configs VALUES (?, ?, ?, ?, ?, 1, ?)",
                (config_id, owner, project_id, int(shared), json.dumps(document), time.time()),
            )
            self._conn.commit()

    def config(self, config_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, owner, project_id, shared, document, version, created_at"
                " FROM configs WHERE id = ?",
                (config_id,),
            ).fetchone()
        if not row:
            return None
        return {
            "id": row[0],
            "owner": row[1],
            "project_id": row[2],
            "shared": bool(row[3]),
            "document": json.loads(row[4]),
            "version": row[5],
            "created_at": row[6],
        }

    def configs_visible(self, owner: str, project_id: str | None) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, owner, project_id, shared, created_at FROM configs"
                " WHERE (shared = 1 AND owner = ?) OR (project_id IS NOT NULL AND project_id = ?)"
                " ORDER BY created_at",
                (owner, project_id),
            ).fetchall()
        return [
            {
                "id": r[0],
                "owner": r[1],
                "project_id": r[2],
                "shared": bool(r[3]),
                "created_at": r[4],
            }
            for r in rows
        ]

    # --- jobs ---------------------------------------------------------------

    def insert_job(
        self,
        job_id: str,
        project_id: str,
        gym_id: str,
        config_id: str,
        cluster: dict,
        api_token: str,
    ) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO jobs VALUES (?, ?, ?, ?, 'created', ?, ?, ?, NULL)",
                (job_id, project_id, gym_id, config_id, json.dumps(cluster), api_token, time.time()),
            )
            self._conn.commit()

    def job(self, job_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, project_id, gym_id, config_id, status, cluster, api_token,"
                " created_at, result_ref FROM jobs WHERE id = ?",
                (job_id,),
            ).fetchone()
        return _job_row(row) if row else None

    def jobs_in(self, project_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, project_id, gym_id, config_id, status, cluster, api_token,"
                " created_at, result_ref FROM jobs WHERE project_id = ? ORDER BY created_at",
                (project_id,),
            ).fetchall()
        return [_job_row(r) for r in rows]

    def set_job_status(self, job_id: str, status: str) -> None:
        with self._lock:
            self._conn.execute("UPDATE jobs SET status = ? WHERE id = ?", (status, job_id))
            self._conn.commit()

    def set_result(self, job_id: str, document: dict, result_ref: str) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO results VALUES (?, ?)", (job_id, json.dumps(document))
            )
            self._conn.execute(
                "UPDATE jobs SET result_ref = ? WHERE id = ?", (result_ref, job_id)
            )
            self._conn.commit()

    def result(self, job_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT document FROM results WHERE job_id = ?", (job_id,)
            ).fetchone()
        return json.loads(row[0]) if row else None

    # --- events ---------------------------------------------------------------

    def append_event(self, job_id: str, kind: str, payload: dict) -> tuple[int, float]:
        """Allocate the next dense seq and persist atomically.

        When `kind` is "status" the job row is updated in the same
        transaction, keeping job_status coherent with the log.
        """
        with self._lock:
            ts = time.time()
            cursor = self._conn.execute(
                "SELECT COALESCE(MAX(seq), 0) + 1 FROM events WHERE job_id = ?", (job_id,)
            )
            seq = cursor.fetchone()[0]
            self._conn.execute(
                "INSERT INTO events VALUES (?, ?, ?, ?, ?)",
                (job_id, seq, kind, json.dumps(payload, sort_keys=True), ts),
            )
            if kind == "status" and "status" in payload:
                self._conn.execute(
                    "UPDATE jobs SET status = ? WHERE id = ?", (payload["status"], job_id)
                )
            self._conn.commit()
            return seq, ts

    def events_after(self, job_id: str, after_seq: int, limit: int = 1000) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT seq, kind, payload, ts FROM events"
                " WHERE job_id = ? AND seq > ? ORDER BY seq LIMIT ?",
                (job_id, after_seq, limit),
            ).fetchall()
        return [
            {"job_id": job_id, "seq": r[0], "kind": r[1], "payload": json.loads(r[2]), "ts": r[3]}
            for r in rows
        ]

    def max_seq(self, job_id: str) -> int:
        with self._lock:
            row = self._conn.execute(
                "SELECT COALESCE(MAX(seq), 0) FROM events WHERE job_id = ?", (job_id,)
            ).fetchone()
        return row[0]

    def event_counts(self, job_id: str) -> dict[str, int]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT kind, COUNT(*) FROM events WHERE job_id = ? GROUP BY kind", (job_id,)
            ).fetchall()
        return {r[0]: r[1] for r in rows}

    def last_event_ts(self, job_id: str) -> float | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT MAX(ts) FROM events WHERE job_id = ?", (job_id,)
            ).fetchone()
        return row[0]

    # --- templates --------------------------------------------------------------

    def insert_template(self, template_id: str, document: dict) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO templates VALUES (?, ?)",
                (template_id, json.dumps(document)),
            )
            self._conn.commit()

    def templates(self) -> list[dict]:
        with self._lock:
            rows = self._conn.execute("SELECT document FROM templates").fetchall()
        return [json.loads(r[0]) for r in rows]


def _project_row(row) -> dict:
    return {
        "id": row[0],
        "name": row[1],
        "members": json.loads(row[2]),
        "created_at": row[3],
    }


def _job_row(row) -> dict:
    return {
        "id": row[0],
        "project_id": row[1],
        "gym_id": row[2],
        "config_id": row[3],
        "status": row[4],
        "cluster": json.loads(row[5]),
        "api_token": row[6],
        "created_at": row[7],
        "result_ref": row[8],
    }
