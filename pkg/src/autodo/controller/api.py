"""HTTP+JSON API (all paths under /api/v1) plus the server-push event stream."""

from __future__ import annotations

import threading
from typing import Any

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from ..catalog import NotFound as CatalogNotFound
from ..catalog import UnknownCategory
from ..catalog import ValidationFailed as CatalogValidationFailed
from ..engine.config import InvalidConfig
from ..gymspec import ParseError, SchemaError, parse_document
from .service import (
    AlreadyLaunched,
    AuthFailed,
    ControllerService,
    DuplicateName,
    Forbidden,
    JobTerminal,
    LaunchFailed,
    NotFound,
    PayloadTooLarge,
    ValidationFailed,
)
from .store import event_frame

API_PREFIX = "/api/v1"


class ProjectBody(BaseModel):
    name: str


class ConfigBody(BaseModel):
    config: dict
    share: bool = False
    project_id: str | None = None


class JobBody(BaseModel):
    gym_id: str
    config_id: str
    cluster: dict = {"type": "shared"}


class EventBody(BaseModel):
    kind: str
    payload: dict


class TemplateBody(BaseModel):
    name: str
    description: str = ""
    category_ids: list[str]
    spec: dict


def _findings_payload(findings) -> list[dict]:
    out = []
    for f in findings:
        if isinstance(f, dict):
            out.append(f)
        else:
            out.append({"code": f.code, "path": f.path, "message": f.message})
    return out


def create_app(service: ControllerService, heartbeat: float = 15.0) -> FastAPI:
    app = FastAPI(title="autodo controller", version="1")
    app.state.service = service
    app.state.heartbeat = heartbeat

    def principal(authorization: str | None = Header(default=None)) -> str:
        token = None
        if authorization and authorization.lower().startswith("bearer "):
            token = authorization[7:]
        return service.authenticate(token)

    def worker_token(authorization: str | None = Header(default=None)) -> str:
        if authorization and authorization.lower().startswith("bearer "):
            return authorization[7:]
        raise AuthFailed("missing worker token")

    # --- error mapping ----------------------------------------------------

    @app.exception_handler(AuthFailed)
    async def _auth(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=401)

    @app.exception_handler(Forbidden)
    async def _forbidden(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=403)

    @app.exception_handler(NotFound)
    async def _missing(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=404)

    @app.exception_handler(CatalogNotFound)
    async def _cat_missing(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=404)

    @app.exception_handler(DuplicateName)
    async def _duplicate(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=409)

    @app.exception_handler(AlreadyLaunched)
    async def _launched(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=409)

    @app.exception_handler(JobTerminal)
    async def _terminal(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=409)

    @app.exception_handler(PayloadTooLarge)
    async def _too_large(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=413)

    @app.exception_handler(LaunchFailed)
    async def _launch_failed(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=502)

    @app.exception_handler(ValidationFailed)
    async def _invalid(_, exc):
        return JSONResponse(
            {"error": "validation failed", "findings": _findings_payload(exc.findings)},
            status_code=422,
        )

    @app.exception_handler(CatalogValidationFailed)
    async def _cat_invalid(_, exc):
        return JSONResponse(
            {"error": "validation failed", "findings": _findings_payload(exc.findings)},
            status_code=422,
        )

    @app.exception_handler(UnknownCategory)
    async def _unknown_category(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=422)

    @app.exception_handler(ParseError)
    async def _parse_error(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=422)

    @app.exception_handler(SchemaError)
    async def _schema_error(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=422)

    @app.exception_handler(InvalidConfig)
    async def _bad_config(_, exc):
        return JSONResponse({"error": str(exc)}, status_code=422)

    # --- projects ----------------------------------------------------------

    @app.post(f"{API_PREFIX}/projects")
    def create_project(body: ProjectBody, who: str = Depends(principal)):
        return service.create_project(body.name, who)

    @app.get(f"{API_PREFIX}/projects")
    def list_projects(who: str = Depends(principal)):
        return service.list_projects(who)

    # --- gyms ----------------------------------------------------------------

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/gyms")
    def put_gym(project_id: str, body: dict, who: str = Depends(principal)):
        gym_id = service.put_gym(project_id, body, who)
        return {"gym_id": gym_id}

    @app.get(f"{API_PREFIX}/projects/{{project_id}}/gyms")
    def list_gyms(project_id: str, who: str = Depends(principal)):
        return service.list_gyms(project_id, who)

    @app.get(f"{API_PREFIX}/projects/{{project_id}}/gyms/{{gym_id}}")
    def get_gym(project_id: str, gym_id: str, who: str = Depends(principal)):
        return service.get_gym(project_id, gym_id, who)

    # --- configs ---------------------------------------------------------------

    @app.post(f"{API_PREFIX}/configs")
    def put_config(body: ConfigBody, who: str = Depends(principal)):
        config_id = service.put_config(body.config, body.share, who, body.project_id)
        return {"config_id": config_id}

    @app.get(f"{API_PREFIX}/configs")
    def list_configs(
        project_id: str | None = Query(default=None), who: str = Depends(principal)
    ):
        return service.list_configs(who, project_id)

    @app.get(f"{API_PREFIX}/configs/{{config_id}}")
    def get_config(config_id: str, who: str = Depends(principal)):
        return service.get_config(config_id, who)

    @app.get(f"{API_PREFIX}/schemas")
    def get_schemas():
        from ..engine import default_schemas

        out: dict[str, Any] = {}
        for kind, schema in default_schemas().items():
            out[kind.value] = [
                {
                    "name": p.name,
                    "type": p.type,
                    "default": p.default,
                    **({"values": list(p.values)} if p.values is not None else {}),
                    **({"range": list(p.range)} if p.range is not None else {}),
                }
                for p in schema.params
            ]
        return out

    # --- jobs ---------------------------------------------------------------

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/jobs")
    def create_job(project_id: str, body: JobBody, who: str = Depends(principal)):
        job = service.create_job(project_id, body.gym_id, body.config_id, body.cluster, who)
        return {k: v for k, v in job.items() if k != "api_token"}

    @app.get(f"{API_PREFIX}/projects/{{project_id}}/jobs")
    def list_jobs(project_id: str, who: str = Depends(principal)):
        return service.list_jobs(project_id, who)

    @app.post(f"{API_PREFIX}/jobs/{{job_id}}/launch")
    def launch(job_id: str, who: str = Depends(principal)):
        job = service.launch(job_id, who)
        return {"id": job["id"], "status": job["status"]}

    @app.post(f"{API_PREFIX}/jobs/{{job_id}}/cancel")
    def cancel(job_id: str, who: str = Depends(principal)):
        job = service.cancel(job_id, who)
        return {"id": job["id"], "status": job["status"]}

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}")
    def job_status(job_id: str, who: str = Depends(principal)):
        return service.job_status(job_id, who)

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/result")
    def job_result(job_id: str, who: str = Depends(principal)):
        return service.get_result(job_id, who)

    # --- worker surface ----------------------------------------------------

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/bundle")
    def bundle(job_id: str, token: str = Depends(worker_token)):
        return service.fetch_bundle(job_id, token)

    @app.post(f"{API_PREFIX}/jobs/{{job_id}}/events")
    def append_event(job_id: str, body: EventBody, token: str = Depends(worker_token)):
        seq = service.append_event(job_id, token, body.kind, body.payload)
        return {"seq": seq}

    @app.post(f"{API_PREFIX}/jobs/{{job_id}}/result")
    def store_result(job_id: str, body: dict, token: str = Depends(worker_token)):
        result_ref = service.store_result(job_id, token, body)
        return {"result_ref": result_ref}

    # --- event stream ---------------------------------------------------------

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/events")
    def stream(request: Request, job_id: str, from_seq: int = Query(default=1, ge=1)):
        service.events(job_id, from_seq, limit=1)  # 404 before the stream starts
        stop = threading.Event()

        def frames():
            try:
                for kind, event in service.stream_events(
                    job_id, from_seq, heartbeat=app.state.heartbeat, stop=stop
                ):
                    if kind == "event":
                        frame = event_frame(
                            event["job_id"],
                            event["seq"],
                            event["kind"],
                            event["payload"],
                            event["ts"],
                        )
                        yield f"data: {frame}\n\n"
                    elif kind == "heartbeat":
                        yield ": hb\n\n"
                    else:
                        yield 'data: {"kind":"end_of_stream"}\n\n'
                        return
            finally:
                stop.set()

        return StreamingResponse(frames(), media_type="text/event-stream")

    # --- behavior analytics (derived from stored protocols) -----------------

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/candidates")
    def candidates(job_id: str, who: str = Depends(principal)):
        result = service.get_result(job_id, who)
        return {
            "top_k": result["result"]["top_k"],
            "candidates": result["result"]["candidates"],
        }

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/candidates/{{candidate_id}}/protocols")
    def candidate_protocols(job_id: str, candidate_id: str, who: str = Depends(principal)):
        protocols = service.candidate_protocols(job_id, candidate_id, who)
        return {"episodes": [p.to_document() for p in protocols]}

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/candidates/{{candidate_id}}/matrix")
    def candidate_matrix(
        job_id: str,
        candidate_id: str,
        kind: str = Query(default="state"),
        k: int = Query(default=10, ge=1),
        seed: int = Query(default=0),
        who: str = Depends(principal),
    ):
        from ..analytics import (
            TooFewStates,
            action_transition_matrix,
            cluster_states,
            clustered_matrix,
            state_transition_matrix,
        )

        protocols = service.candidate_protocols(job_id, candidate_id, who)
        if kind == "state":
            return state_transition_matrix(protocols).to_document()
        if kind == "action":
            return action_transition_matrix(protocols).to_document()
        if kind == "clustered":
            try:
                clustering = cluster_states(protocols, k, seed)
            except TooFewStates as exc:
                return JSONResponse({"error": str(exc)}, status_code=422)
            matrix = clustered_matrix(protocols, clustering)
            return {"matrix": matrix.to_document(), "clustering": clustering.to_document()}
        return JSONResponse({"error": f"unknown matrix kind {kind!r}"}, status_code=422)

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/candidates/{{candidate_id}}/layout")
    def candidate_layout(
        job_id: str,
        candidate_id: str,
        dims: int = Query(default=2, ge=2, le=3),
        seed: int = Query(default=0),
        episode: int = Query(default=0, ge=0),
        who: str = Depends(principal),
    ):
        from ..analytics import agent_tour, graph_layout, state_transition_matrix

        protocols = service.candidate_protocols(job_id, candidate_id, who)
        matrix = state_transition_matrix(protocols)
        graph = graph_layout(matrix, dims=dims, seed=seed)
        chosen = next((p for p in protocols if p.episode_index == episode), protocols[0])
        tour = agent_tour(chosen, graph)
        document = graph.to_document()
        document["matrix"] = matrix.to_document()
        document["tour"] = [{"from": a, "to": b, "weight": w} for a, b, w in tour]
        return document

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/candidates/{{candidate_id}}/rules")
    def candidate_rules(
        job_id: str,
        candidate_id: str,
        column: str = Query(default="action"),
        buckets: int = Query(default=2, ge=2),
        strategy: str = Query(default="equal_width"),
        lo: int = Query(default=0, ge=0),
        hi: int = Query(default=10_000, ge=0),
        who: str = Depends(principal),
    ):
        from ..rules import (
            ConstantColumn,
            EmptyInterval,
            bucketize,
            concatenate_evaluations,
            coverage_stats,
            induce_rules,
        )

        protocols = service.candidate_protocols(job_id, candidate_id, who)
        try:
            table = concatenate_evaluations(protocols, (lo, hi))
            data = bucketize(table, column, buckets, strategy, interval=(lo, hi))
        except (EmptyInterval, ConstantColumn, KeyError, ValueError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        ruleset = induce_rules(data)
        document = ruleset.to_document()
        document["coverage"] = coverage_stats(ruleset, data).to_document()
        document["rendered"] = ruleset.render().splitlines()
        return document

    @app.post(f"{API_PREFIX}/codegen")
    def codegen(body: dict, who: str = Depends(principal)):
        from ..gymspec import InvalidSpec, generate_source

        spec = parse_document(body.get("spec", body))
        backend = body.get("backend", "python")
        try:
            return {"backend": backend, "source": generate_source(spec, backend)}
        except InvalidSpec as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)

    # --- catalog ---------------------------------------------------------------

    @app.get(f"{API_PREFIX}/catalog/{{taxonomy}}/nodes")
    def catalog_roots(taxonomy: str):
        return service.catalog.browse(taxonomy=taxonomy).to_document()

    @app.get(f"{API_PREFIX}/catalog/{{taxonomy}}/nodes/{{node_id}}")
    def catalog_node(taxonomy: str, node_id: str):
        result = service.catalog.browse(node_id)
        if result.parent and result.parent.taxonomy != taxonomy:
            raise NotFound(f"node {node_id!r} is not in taxonomy {taxonomy!r}")
        return result.to_document()

    @app.get(f"{API_PREFIX}/catalog/templates/{{template_id}}")
    def catalog_template(template_id: str):
        return service.catalog.template(template_id).to_document()

    @app.post(f"{API_PREFIX}/catalog/templates")
    def publish_template(body: TemplateBody, who: str = Depends(principal)):
        spec = parse_document(body.spec)
        entry = service.catalog.publish_template(
            spec, body.name, body.description, body.category_ids, author=who
        )
        service.store.insert_template(entry.id, entry.to_document())
        return entry.to_document(include_spec=False)

    @app.get(f"{API_PREFIX}/catalog/search")
    def search_templates(q: str = Query(default="")):
        return [t.to_document(include_spec=False) for t in service.catalog.search_templates(q)]

    return app
