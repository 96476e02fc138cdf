"""Worker launchers: shared in-process pool, or a user-supplied endpoint."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import httpx

from .worker import LocalControllerClient, run_worker


class SharedPoolLauncher:
    """Runs workers on a bounded thread pool inside the controller process."""

    def __init__(self, service, pool_size: int = 2):
        self.service = service
        self._pool = ThreadPoolExecutor(max_workers=pool_size, thread_name_prefix="worker")
        self._futures = []

    def launch(self, job: dict) -> None:
        client = LocalControllerClient(self.service, job["id"], job["api_token"])
        self._futures.append(self._pool.submit(self._run, client))

    @staticmethod
    def _run(client: LocalControllerClient) -> None:
        try:
            run_worker(client)
        except Exception:
            pass  # terminal status already posted by the worker

    def drain(self, timeout: float | None = None) -> None:
        """Wait for submitted workers; test/shutdown helper."""
        for future in list(self._futures):
            future.result(timeout=timeout)
        self._futures.clear()

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)


class CustomEndpointLauncher:
    """POSTs the job descriptor to the endpoint named by the job's cluster."""

    def __init__(self, controller_url: str, timeout: float = 10.0):
        self.controller_url = controller_url
        self.timeout = timeout

    def launch(self, job: dict) -> None:
        descriptor = {
            "job_id": job["id"],
            "api_token": job["api_token"],
            "controller_url": self.controller_url,
        }
        response = httpx.post(
            job["cluster"]["endpoint"], json=descriptor, timeout=self.timeout
        )
        response.raise_for_status()
