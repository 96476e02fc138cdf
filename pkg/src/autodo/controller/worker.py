"""Worker execution: fetch the job bundle, run the search, stream events.

The worker only talks to the controller through a small client interface,
so the same code runs in the shared in-process pool and as a standalone
process pointed at a controller URL.
"""

from __future__ import annotations

import json
from typing import Protocol

import httpx

from ..engine import config_from_document, default_schemas, search
from ..gymspec import parse_document
from .service import PAYLOAD_CAP_BYTES

CHUNK_BYTES = 200 * 1024  # headroom under the event payload cap


class ControllerClient(Protocol):
    def fetch_bundle(self) -> dict: ...

    def append(self, kind: str, payload: dict) -> int: ...

    def store_result(self, document: dict) -> str: ...


class LocalControllerClient:
    """Direct service calls for the shared in-process pool."""

    def __init__(self, service, job_id: str, api_token: str):
        self.service = service
        self.job_id = job_id
        self.api_token = api_token

    def fetch_bundle(self) -> dict:
        return self.service.fetch_bundle(self.job_id, self.api_token)

    def append(self, kind: str, payload: dict) -> int:
        return self.service.append_event(self.job_id, self.api_token, kind, payload)

    def store_result(self, document: dict) -> str:
        return self.service.store_result(self.job_id, self.api_token, document)


class HttpControllerClient:
    """Worker-side HTTP client against a controller base URL."""

    def __init__(self, controller_url: str, job_id: str, api_token: str):
        self.base = controller_url.rstrip("/")
        self.job_id = job_id
        self._client = httpx.Client(
            headers={"Authorization": f"Bearer {api_token}"}, timeout=30.0
        )

    def fetch_bundle(self) -> dict:
        response = self._client.get(f"{self.base}/api/v1/jobs/{self.job_id}/bundle")
        response.raise_for_status()
        return response.json()

    def append(self, kind: str, payload: dict) -> int:
        response = self._client.post(
            f"{self.base}/api/v1/jobs/{self.job_id}/events",
            json={"kind": kind, "payload": payload},
        )
        response.raise_for_status()
        return response.json()["seq"]

    def store_result(self, document: dict) -> str:
        response = self._client.post(
            f"{self.base}/api/v1/jobs/{self.job_id}/result", json=document
        )
        response.raise_for_status()
        return response.json()["result_ref"]


def chunk_protocols(candidate_id: str, csv_text: str) -> list[dict]:
    """Split serialized protocol data into payloads under the event cap."""
    parts = [csv_text[i : i + CHUNK_BYTES] for i in range(0, len(csv_text), CHUNK_BYTES)] or [""]
    return [
        {
            "candidate_id": candidate_id,
            "chunk_index": index,
            "total_chunks": len(parts),
            "data": part,
        }
        for index, part in enumerate(parts)
    ]


def run_worker(client: ControllerClient) -> None:
    """Execute one job end to end, posting the terminal status at exit."""
    try:
        bundle = client.fetch_bundle()
        client.append("status", {"status": "running"})
        spec = parse_document(bundle["gym"])
        config = config_from_document(bundle["config"])
        result = search(spec, config, default_schemas(), event_sink=client.append)

        protocols_csv = {c.candidate_id: result.protocols_csv(c.candidate_id) for c in result.top}
        for candidate in result.top:
            for chunk in chunk_protocols(
                candidate.candidate_id, protocols_csv[candidate.candidate_id]
            ):
                client.append("protocol_chunk", chunk)
        document = {"result": result.to_document(), "protocols_csv": protocols_csv}
        client.store_result(document)
        client.append("status", {"status": "succeeded"})
    except Exception as exc:
        try:
            client.append("log", {"level": "error", "message": f"{type(exc).__name__}: {exc}"})
            client.append("status", {"status": "failed", "reason": str(exc)})
        except Exception:
            pass
        raise
