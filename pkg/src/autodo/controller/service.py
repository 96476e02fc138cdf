"""Controller domain logic: projects, gyms, configs, jobs, and the event log.

Authentication is deliberately minimal (static bearer tokens for users,
per-job tokens for workers) and is documented as non-production-grade.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
import uuid
from typing import Iterator

from ..catalog import Catalog
from ..engine import config_from_document, default_schemas, validate_config
from ..engine.config import InvalidConfig
from ..gymspec import parse_document, to_document, validate
from .store import TERMINAL_STATUSES, Store, event_frame

PAYLOAD_CAP_BYTES = 256 * 1024


class AuthFailed(Exception):
    pass


class NotFound(Exception):
    pass


class Forbidden(Exception):
    pass


class DuplicateName(Exception):
    pass


class ValidationFailed(Exception):
    def __init__(self, findings):
        self.findings = findings
        super().__init__(f"validation produced {len(findings)} finding(s)")


class AlreadyLaunched(Exception):
    pass


class LaunchFailed(Exception):
    pass


class JobTerminal(Exception):
    pass


class PayloadTooLarge(Exception):
    pass


class ControllerService:
    def __init__(
        self,
        store: Store | None = None,
        catalog: Catalog | None = None,
        principal_tokens: dict[str, str] | None = None,
        heartbeat_timeout: float | None = None,
    ):
        self.store = store or Store()
        self.catalog = catalog or Catalog()
        self._principal_tokens = principal_tokens  # token -> principal; None = identity mode
        self.heartbeat_timeout = heartbeat_timeout
        self._launchers: dict[str, object] = {}
        self._conditions: dict[str, threading.Condition] = {}
        self._cond_lock = threading.Lock()
        self._reload_templates()

    def _reload_templates(self) -> None:
        for document in self.store.templates():
            try:
                self.catalog.publish_template(
                    parse_document(document["spec"]),
                    name=document["name"],
                    description=document["description"],
                    category_ids=document["category_ids"],
                    author=document.get("author", ""),
                    template_id=document["id"],
                )
            except Exception:
                continue  # stale entry; browsing still works for the rest

    def register_launcher(self, cluster_type: str, launcher) -> None:
        self._launchers[cluster_type] = launcher

    # --- auth ---------------------------------------------------------------

    def authenticate(self, token: str | None) -> str:
        if not token:
            raise AuthFailed("missing bearer token")
        if self._principal_tokens is None:
            return token  # identity mode: the token names the principal
        principal = self._principal_tokens.get(token)
        if principal is None:
            raise AuthFailed("unknown principal token")
        return principal

    # --- projects -------------------------------------------------------------

    def create_project(self, name: str, principal: str) -> dict:
        if not name or not name.strip():
            raise ValidationFailed([{"code": "EMPTY_NAME", "path": "name"}])
        if any(p["name"] == name for p in self.store.projects()):
            raise DuplicateName(f"project named {name!r} already exists")
        project_id = f"p-{uuid.uuid4().hex[:10]}"
        self.store.insert_project(project_id, name, [principal])
        return self.store.project(project_id)

    def list_projects(self, principal: str) -> list[dict]:
        return [p for p in self.store.projects() if principal in p["members"]]

    def _member_project(self, project_id: str, principal: str) -> dict:
        project = self.store.project(project_id)
        if project is None:
            raise NotFound(f"no project {project_id!r}")
        if principal not in project["members"]:
            raise Forbidden(f"{principal!r} is not a member of {project_id!r}")
        return project

    # --- gyms ---------------------------------------------------------------

    def put_gym(self, project_id: str, document: dict, principal: str) -> str:
        self._member_project(project_id, principal)
        spec = parse_document(document)
        report = validate(spec)
        if not report.ok:
            raise ValidationFailed(report.findings)
        gym_id = f"g-{uuid.uuid4().hex[:10]}"
        self.store.insert_gym(gym_id, project_id, spec.name, to_document(spec))
        return gym_id

    def get_gym(self, project_id: str, gym_id: str, principal: str) -> dict:
        self._member_project(project_id, principal)
        gym = self.store.gym(gym_id)
        if gym is None or gym["project_id"] != project_id:
            raise NotFound(f"no gym {gym_id!r} in project {project_id!r}")
        return gym

    def list_gyms(self, project_id: str, principal: str) -> list[dict]:
        self._member_project(project_id, principal)
        return self.store.gyms_in(project_id)

    # --- configs -------------------------------------------------------------

    def put_config(
        self, document: dict, share: bool, principal: str, project_id: str | None = None
    ) -> str:
        config = config_from_document(document)  # raises on malformed input
        validate_config(config, default_schemas())
        if not share and project_id is None:
            raise InvalidConfig("unshared configs must name their project")
        if project_id is not None:
            self._member_project(project_id, principal)
        config_id = f"c-{uuid.uuid4().hex[:10]}"
        self.store.insert_config(config_id, principal, project_id, share, document)
        return config_id

    def get_config(self, config_id: str, principal: str) -> dict:
        config = self.store.config(config_id)
        if config is None:
            raise NotFound(f"no config {config_id!r}")
        if not config["shared"] and config["owner"] != principal:
            project = self.store.project(config["project_id"]) if config["project_id"] else None
            if not project or principal not in project["members"]:
                raise Forbidden("config is not shared and you are not a member")
        return config

    def list_configs(self, principal: str, project_id: str | None = None) -> list[dict]:
        if project_id is not None:
            self._member_project(project_id, principal)
        return self.store.configs_visible(principal, project_id)

    # --- jobs ---------------------------------------------------------------

    def create_job(
        self, project_id: str, gym_id: str, config_id: str, cluster: dict, principal: str
    ) -> dict:
        self._member_project(project_id, principal)
        gym = self.store.gym(gym_id)
        if gym is None or gym["project_id"] != project_id:
            raise NotFound(f"no gym {gym_id!r} in project {project_id!r}")
        if self.store.config(config_id) is None:
            raise NotFound(f"no config {config_id!r}")
        kind = cluster.get("type")
        if kind not in ("shared", "custom"):
            raise ValidationFailed([{"code": "BAD_CLUSTER", "path": "cluster.type"}])
        if kind == "custom" and not cluster.get("endpoint"):
            raise ValidationFailed([{"code": "BAD_CLUSTER", "path": "cluster.endpoint"}])
        job_id = f"j-{uuid.uuid4().hex[:10]}"
        api_token = secrets.token_urlsafe(24)  # 192 bits
        self.store.insert_job(job_id, project_id, gym_id, config_id, cluster, api_token)
        return self.store.job(job_id)

    def launch(self, job_id: str, principal: str) -> dict:
        job = self.store.job(job_id)
        if job is None:
            raise NotFound(f"no job {job_id!r}")
        self._member_project(job["project_id"], principal)
        if job["status"] != "created":
            raise AlreadyLaunched(f"job is {job['status']}")
        launcher = self._launchers.get(job["cluster"]["type"])
        if launcher is None:
            raise LaunchFailed(f"no launcher for cluster type {job['cluster']['type']!r}")
        self._append(job_id, "status", {"status": "launched"})
        try:
            launcher.launch(job)
        except Exception as exc:
            self._append(job_id, "status", {"status": "failed", "reason": f"launch: {exc}"})
            raise LaunchFailed(str(exc)) from exc
        return self.store.job(job_id)

    def cancel(self, job_id: str, principal: str) -> dict:
        job = self.store.job(job_id)
        if job is None:
            raise NotFound(f"no job {job_id!r}")
        self._member_project(job["project_id"], principal)
        if job["status"] not in TERMINAL_STATUSES:
            self._append(job_id, "status", {"status": "cancelled"})
        return self.store.job(job_id)

    def job_status(self, job_id: str, principal: str | None = None) -> dict:
        job = self.store.job(job_id)
        if job is None:
            raise NotFound(f"no job {job_id!r}")
        if principal is not None:
            self._member_project(job["project_id"], principal)
        self._check_heartbeat(job)
        job = self.store.job(job_id)
        return {
            "id": job["id"],
            "project_id": job["project_id"],
            "gym_id": job["gym_id"],
            "config_id": job["config_id"],
            "status": job["status"],
            "cluster": job["cluster"],
            "created_at": job["created_at"],
            "result_ref": job["result_ref"],
            "event_counts": self.store.event_counts(job_id),
        }

    def list_jobs(self, project_id: str, principal: str) -> list[dict]:
        self._member_project(project_id, principal)
        return [
            {k: v for k, v in job.items() if k != "api_token"}
            for job in self.store.jobs_in(project_id)
        ]

    def _check_heartbeat(self, job: dict) -> None:
        if self.heartbeat_timeout is None or job["status"] != "running":
            return
        last = self.store.last_event_ts(job["id"])
        if last is not None and time.time() - last > self.heartbeat_timeout:
            self._append(
                job["id"], "status", {"status": "failed", "reason": "worker heartbeat lost"}
            )

    # --- events ---------------------------------------------------------------

    def _condition(self, job_id: str) -> threading.Condition:
        with self._cond_lock:
            if job_id not in self._conditions:
                self._conditions[job_id] = threading.Condition()
            return self._conditions[job_id]

    def _append(self, job_id: str, kind: str, payload: dict) -> int:
        seq, _ = self.store.append_event(job_id, kind, payload)
        condition = self._condition(job_id)
        with condition:
            condition.notify_all()
        return seq

    def append_event(self, job_id: str, api_token: str, kind: str, payload: dict) -> int:
        """Worker-facing append: token-checked, dense seq, atomic."""
        job = self.store.job(job_id)
        if job is None:
            raise NotFound(f"no job {job_id!r}")
        if not secrets.compare_digest(api_token or "", job["api_token"]):
            raise AuthFailed("bad job token")
        if job["status"] in TERMINAL_STATUSES:
            raise JobTerminal(f"job is {job['status']}")
        if len(json.dumps(payload)) > PAYLOAD_CAP_BYTES:
            raise PayloadTooLarge(f"payload exceeds {PAYLOAD_CAP_BYTES} bytes")
        return self._append(job_id, kind, payload)

    def fetch_bundle(self, job_id: str, api_token: str) -> dict:
        """Worker-facing: the gym and config documents behind a job id."""
        job = self.store.job(job_id)
        if job is None:
            raise NotFound(f"no job {job_id!r}")
        if not secrets.compare_digest(api_token or "", job["api_token"]):
            raise AuthFailed("bad job token")
        gym = self.store.gym(job["gym_id"])
        config = self.store.config(job["config_id"])
        return {"job_id": job_id, "gym": gym["document"], "config": config["document"]}

    def store_result(self, job_id: str, api_token: str, document: dict) -> str:
        job = self.store.job(job_id)
        if job is None:
            raise NotFound(f"no job {job_id!r}")
        if not secrets.compare_digest(api_token or "", job["api_token"]):
            raise AuthFailed("bad job token")
        result_ref = f"/api/v1/jobs/{job_id}/result"
        self.store.set_result(job_id, document, result_ref)
        return result_ref

    def get_result(self, job_id: str, principal: str) -> dict:
        job = self.store.job(job_id)
        if job is None:
            raise NotFound(f"no job {job_id!r}")
        self._member_project(job["project_id"], principal)
        result = self.store.result(job_id)
        if result is None:
            raise NotFound(f"no result for job {job_id!r}")
        return result

    def candidate_protocols(self, job_id: str, candidate_id: str, principal: str):
        """Evaluation protocols of a ranked candidate, from the stored result."""
        import io

        from ..engine import read_protocols

        result = self.get_result(job_id, principal)
        csv_text = (result.get("protocols_csv") or {}).get(candidate_id)
        if csv_text is None:
            raise NotFound(f"no protocols for candidate {candidate_id!r} (top-k only)")
        return read_protocols(io.StringIO(csv_text))

    def events(self, job_id: str, from_seq: int = 1, limit: int = 100_000) -> list[dict]:
        if self.store.job(job_id) is None:
            raise NotFound(f"no job {job_id!r}")
        return self.store.events_after(job_id, from_seq - 1, limit)

    def stream_events(
        self,
        job_id: str,
        from_seq: int = 1,
        heartbeat: float = 15.0,
        stop: threading.Event | None = None,
    ) -> Iterator[tuple[str, dict | None]]:
        """Replay persisted events, then tail live ones in seq order.

        Yields ("event", event), ("heartbeat", None) frames and a final
        ("end", None) once the job is terminal and fully delivered.
        """
        if self.store.job(job_id) is None:
            raise NotFound(f"no job {job_id!r}")
        last = from_seq - 1
        condition = self._condition(job_id)
        while True:
            if stop is not None and stop.is_set():
                return
            batch = self.store.events_after(job_id, last, limit=500)
            if batch:
                for event in batch:
                    last = event["seq"]
                    yield ("event", event)
                continue
            job = self.store.job(job_id)
            if job["status"] in TERMINAL_STATUSES and last >= self.store.max_seq(job_id):
                yield ("end", None)
                return
            with condition:
                woke = condition.wait(timeout=heartbeat)
            if not woke:
                self._check_heartbeat(self.store.job(job_id))
                yield ("heartbeat", None)

    def event_frames(self, job_id: str, from_seq: int = 1) -> list[str]:
        """Byte-stable frames of the persisted log (replay path)."""
        return [
            event_frame(e["job_id"], e["seq"], e["kind"], e["payload"], e["ts"])
            for e in self.events(job_id, from_seq)
        ]
