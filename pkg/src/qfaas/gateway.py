"""HTTP API surface.

Routes (bearer token required everywhere except login and /metrics):

- ``POST /api/auth/login``                      password -> bearer token
- ``POST /api/function/{identifier}``           invoke a deployed function
- ``POST/GET /api/functions``                   create / list functions
- ``GET/PUT/DELETE /api/functions/{identifier}``
- ``GET /api/functions/{identifier}/deployments``
- ``GET /api/job/{job_id}``, ``GET /api/jobs``
- ``GET /api/backends``
- ``GET /metrics``                              plaintext counters, no auth

Invocation walks the full sequence: dependency check, input pre-processing,
circuit instantiation, backend selection, job submission, a bounded wait for
the result, and post-processing.  ``waitForResult: false`` returns the job ID
immediately; ``postProcessOnly: true`` re-runs the pipeline over a stored
job's counts.  Every error body is ``{"error", "message", "details"}``.
"""

from __future__ import annotations

import logging
import secrets
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from . import qdsl
from .auth import TokenStore, User, UserStore
from .circuit import stats as circuit_stats
from .circuit import to_text
from .config import Config
from .errors import (
    BackendDown,
    BadRequest,
    CapacityExceeded,
    Conflict,
    DomainError,
    IllegalTransition,
    InsufficientQubits,
    NoEligibleBackend,
    PermissionDenied,
    UnknownBackend,
    UnknownFunction,
    UnknownJob,
)
from .jobstore import Job, JobStatus, JobStore
from .metrics import Metrics
from .providers import BackendInfo, HandleState, ProviderCatalog, ProviderRuntime
from .registry import (
    DeploymentRecord,
    FunctionRecord,
    Registry,
    STATUS_READY,
)
from .selector import SelectionCriteria, select

log = logging.getLogger("qfaas.gateway")

_PUBLIC_ROUTES = {("POST", "/api/auth/login"), ("GET", "/metrics")}


class ApiError(Exception):
    def __init__(self, status_code: int, code: str, message: str, details: Any = None):
        self.status_code = status_code
        self.code = code
        self.message = message
        self.details = details
        super().__init__(message)


def _envelope(code: str, message: str, details: Any = None) -> dict[str, Any]:
    return {"error": code, "message": message, "details": details}


_DOMAIN_STATUS = {
    PermissionDenied: 403,
    UnknownFunction: 404,
    UnknownJob: 404,
    Conflict: 409,
    BadRequest: 422,
    NoEligibleBackend: 503,
    UnknownBackend: 503,
    BackendDown: 503,
    InsufficientQubits: 503,
    CapacityExceeded: 503,
}


def _api_error(exc: DomainError) -> ApiError:
    status = _DOMAIN_STATUS.get(type(exc), 500)
    details = exc.rejections if isinstance(exc, NoEligibleBackend) else None
    return ApiError(status, exc.code, str(exc), details)


# -- wire schemas (unknown fields rejected) -----------------------------------


class LoginBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    username: str
    password: str


class FnCode(BaseModel):
    model_config = ConfigDict(extra="forbid")
    requirements: str = ""
    handlerPy: str
    handlerQs: str = ""


class CreateFunctionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: str
    template: str
    fnCode: FnCode
    public: bool
    author: str | None = None


class UpdateFunctionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    fnCode: FnCode | None = None
    public: bool | None = None


class InvokeBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    input: Any = None
    shots: int = 1024
    waitForResult: bool = True
    provider: str | None = None
    autoSelect: bool = True
    backendType: Literal["qpu", "simulator"] | None = None
    backendName: str | None = None
    postProcessOnly: bool = False
    jobId: str | None = None
    seed: int | None = None


# -- JSON views ----------------------------------------------------------------


def _iso(ts: float | None) -> str | None:
    if ts is None:
        return None
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat().replace("+00:00", "Z")


def _backend_json(info: BackendInfo) -> dict[str, Any]:
    return {
        "name": info.name,
        "provider": info.provider,
        "kind": info.kind,
        "qubits": info.qubits,
        "operational": info.operational,
        "queue_length": info.queue_length,
        "avg_seconds_per_job": info.avg_seconds_per_job,
        "readout_flip_p": info.readout_flip_p,
        "allowed_roles": list(info.allowed_roles),
    }


def _function_json(record: FunctionRecord, detail: bool = False) -> dict[str, Any]:
    doc = {
        "identifier": record.identifier,
        "name": record.name,
        "template": record.template,
        "author": record.author,
        "public": record.public,
        "version": record.version,
        "status": record.status,
        "created_at": _iso(record.created_at),
        "updated_at": _iso(record.updated_at),
    }
    if detail:
        doc["fnCode"] = {
            "requirements": record.requirements_b64,
            "handlerPy": record.source_b64,
            "handlerQs": record.handler_qs_b64,
        }
    return doc


def _deployment_json(dep: DeploymentRecord) -> dict[str, Any]:
    return {
        "identifier": dep.identifier,
        "version": dep.version,
        "started_at": _iso(dep.started_at),
        "finished_at": _iso(dep.finished_at),
        "stages": [
            {"name": s.name, "status": s.status, "log": s.log, "at": _iso(s.at)}
            for s in dep.stages
        ],
    }


def _job_json(job: Job) -> dict[str, Any]:
    return {
        "job_id": job.job_id,
        "function_identifier": job.function_identifier,
        "owner": job.owner,
        "backend_name": job.backend_name,
        "provider": job.provider,
        "shots": job.shots,
        "seed": job.seed,
        "status": job.status.value,
        "submitted_at": _iso(job.submitted_at),
        "started_at": _iso(job.started_at),
        "finished_at": _iso(job.finished_at),
        "counts": job.counts,
        "result_data": job.result_data,
        "error": job.error,
        "waiting_ms": job.waiting_ms,
        "running_ms": job.running_ms,
        "circuit_text": job.circuit_text,
    }


def _invoke_details(job: Job) -> dict[str, Any]:
    details: dict[str, Any] = {
        "jobId": job.job_id,
        "status": job.status.value,
        "backend": job.backend_name,
        "provider": job.provider,
        "shots": job.shots,
        "seed": job.seed,
        "waiting_ms": job.waiting_ms,
        "running_ms": job.running_ms,
        "circuit": job.circuit_text,
    }
    if job.counts is not None:
        details["counts"] = job.counts
    if job.error is not None:
        details["error"] = job.error
    return details


# -- application ----------------------------------------------------------------


def create_app(config: Config | None = None) -> FastAPI:
    config = config or Config()
    data_dir = Path(config.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    catalog = (
        ProviderCatalog.from_file(config.catalog_path)
        if config.catalog_path
        else ProviderCatalog.default()
    )
    runtime = ProviderRuntime(
        catalog,
        sim_workers=config.sim_workers,
        max_in_flight=config.max_in_flight,
        tick_seconds=config.scheduler_tick_seconds,
    )
    pipeline_pool = ThreadPoolExecutor(
        max_workers=config.pipeline_workers, thread_name_prefix="pipeline"
    )
    registry = Registry(data_dir, executor=pipeline_pool)
    jobs = JobStore(data_dir)
    users = UserStore(data_dir, iterations=config.pbkdf2_iterations)
    generated = users.ensure_seed_users(config.admin_password, config.seed_users)
    if generated is not None:
        log.warning("seeded 'admin' user; generated password: %s", generated)
    tokens = TokenStore(ttl_seconds=config.token_ttl_seconds)
    metrics = Metrics()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        runtime.close()
        pipeline_pool.shutdown(wait=False, cancel_futures=True)

    app = FastAPI(
        title="qfaas", docs_url=None, redoc_url=None, openapi_url=None, lifespan=lifespan
    )
    app.state.config = config
    app.state.runtime = runtime
    app.state.registry = registry
    app.state.jobs = jobs
    app.state.users = users
    app.state.tokens = tokens
    app.state.metrics = metrics

    # -- middleware (auth innermost, metrics outermost) ----------------------

    @app.middleware("http")
    async def _auth_middleware(request: Request, call_next):
        path = request.url.path
        if (request.method, path) in _PUBLIC_ROUTES or path == "/ui" or path.startswith("/ui/"):
            return await call_next(request)
        header = request.headers.get("authorization", "")
        token = header[7:].strip() if header.lower().startswith("bearer ") else ""
        username = tokens.resolve(token) if token else None
        user = users.get(username) if username else None
        if user is None:
            return JSONResponse(
                status_code=401,
                content=_envelope("Unauthorized", "missing, invalid, or expired bearer token"),
            )
        request.state.user = user
        return await call_next(request)

    @app.middleware("http")
    async def _metrics_middleware(request: Request, call_next):
        response = await call_next(request)
        metrics.count_http(response.status_code)
        return response

    @app.exception_handler(ApiError)
    async def _api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status_code,
            content=_envelope(exc.code, exc.message, exc.details),
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        problems = [
            {"loc": list(map(str, e.get("loc", ()))), "msg": e.get("msg", ""), "type": e.get("type", "")}
            for e in exc.errors()
        ]
        return JSONResponse(
            status_code=422,
            content=_envelope("ValidationError", "request does not match the schema", problems),
        )

    def current_user(request: Request) -> User:
        return request.state.user

    # -- auth -----------------------------------------------------------------

    @app.post("/api/auth/login")
    def login(body: LoginBody):
        user = users.verify(body.username, body.password)
        if user is None:
            raise ApiError(401, "InvalidCredentials", "bad username or password")
        token, ttl = tokens.issue(user.username)
        return {"access_token": token, "token_type": "bearer", "expires_in": ttl}

    @app.get("/api/me")
    def whoami(request: Request):
        user = current_user(request)
        return {"username": user.username, "role": user.role}

    # -- function management ----------------------------------------------------

    @app.post("/api/functions", status_code=202)
    def create_function(body: CreateFunctionBody, request: Request):
        user = current_user(request)
        try:
            record = registry.create_function(
                name=body.name,
                template=body.template,
                handler_b64=body.fnCode.handlerPy,
                requirements_b64=body.fnCode.requirements,
                handler_qs_b64=body.fnCode.handlerQs,
                public=body.public,
                author=body.author,
                caller=user,
            )
        except DomainError as exc:
            raise _api_error(exc) from exc
        deployments = registry.deployments(record.identifier)
        latest = _deployment_json(deployments[-1]) if deployments else None
        return {"function": _function_json(record), "deployment": latest}

    @app.get("/api/functions")
    def list_functions(request: Request):
        records = registry.list(current_user(request))
        return {"functions": [_function_json(r) for r in records]}

    @app.get("/api/functions/{identifier}")
    def get_function(identifier: str, request: Request):
        try:
            record = registry.get(identifier, current_user(request))
        except DomainError as exc:
            raise _api_error(exc) from exc
        return _function_json(record, detail=True)

    @app.put("/api/functions/{identifier}")
    def update_function(identifier: str, body: UpdateFunctionBody, request: Request):
        try:
            record = registry.update_function(
                identifier,
                handler_b64=body.fnCode.handlerPy if body.fnCode else None,
                requirements_b64=body.fnCode.requirements if body.fnCode else None,
                handler_qs_b64=body.fnCode.handlerQs if body.fnCode else None,
                public=body.public,
                caller=current_user(request),
            )
        except DomainError as exc:
            raise _api_error(exc) from exc
        return _function_json(record)

    @app.delete("/api/functions/{identifier}", status_code=204)
    def delete_function(identifier: str, request: Request):
        try:
            registry.delete(identifier, current_user(request))
        except DomainError as exc:
            raise _api_error(exc) from exc

    @app.get("/api/functions/{identifier}/deployments")
    def get_deployments(identifier: str, request: Request):
        user = current_user(request)
        try:
            registry.get(identifier, user)  # visibility check
            deployments = registry.deployments(identifier)
        except DomainError as exc:
            raise _api_error(exc) from exc
        return {"deployments": [_deployment_json(d) for d in deployments]}

    # -- invocation ---------------------------------------------------------------

    @app.post("/api/function/{identifier}")
    def invoke(identifier: str, body: InvokeBody, request: Request):
        user = current_user(request)

        # (1) dependency check: the function exists, is visible, and is Ready.
        try:
            record = registry.get(identifier, user)
        except UnknownFunction as exc:
            raise _api_error(exc) from exc
        except PermissionDenied as exc:
            raise _api_error(exc) from exc
        if record.status != STATUS_READY or record.compiled is None:
            raise ApiError(
                404, "UnknownFunction",
                f"function '{identifier}' has no published route (status {record.status})",
            )
        fdef = record.compiled

        if body.shots < 1:
            raise ApiError(422, "ValidationError", "shots must be >= 1")
        if body.postProcessOnly and not body.jobId:
            raise ApiError(422, "ValidationError", "postProcessOnly requires jobId")
        if not body.autoSelect and not body.backendName:
            raise ApiError(
                422, "ValidationError", "autoSelect=false requires an explicit backendName"
            )

        if body.postProcessOnly:
            response = _post_process_only(identifier, fdef, body, user)
            metrics.count_invocation()
            return response

        # (2) pre-processing binds the input to declared parameters.
        try:
            bindings = qdsl.preprocess(fdef, body.input)
        except qdsl.InputError as exc:
            raise ApiError(422, type(exc).__name__, str(exc)) from exc

        # (3) circuit generation.
        try:
            circuit = qdsl.instantiate(fdef, bindings)
        except qdsl.EvalError as exc:
            raise ApiError(422, "EvalError", str(exc)) from exc
        cstats = circuit_stats(circuit)
        circuit_text = to_text(circuit)

        # (4) backend selection.
        criteria = SelectionCriteria(
            provider=body.provider,
            backend_type=body.backendType,
            backend_name=body.backendName,
            auto_select=body.autoSelect,
        )
        try:
            decision = select(runtime.list_backends(), user, cstats, criteria)
        except DomainError as exc:
            raise _api_error(exc) from exc

        # (5) create the job and submit to the provider, mirroring transitions.
        seed = body.seed if body.seed is not None else secrets.randbits(63)
        job = jobs.create(
            function_identifier=identifier,
            owner=user.username,
            backend_name=decision.backend.name,
            provider=decision.backend.provider,
            shots=body.shots,
            seed=seed,
            circuit_text=circuit_text,
        )
        jobs.transition(job.job_id, JobStatus.QUEUED)
        listener = _make_mirror(job.job_id, fdef, bindings)
        try:
            runtime.submit(
                decision.backend.name, circuit, body.shots, seed=seed, listener=listener
            )
        except DomainError as exc:
            jobs.transition(job.job_id, JobStatus.FAILED, error=str(exc))
            metrics.count_job_failed()
            raise _api_error(exc) from exc

        # (6) bounded wait, then respond with whatever state the job reached.
        if body.waitForResult:
            snapshot = jobs.await_result(job.job_id, config.default_threshold_ms)
        else:
            snapshot = jobs.get(job.job_id)
        data = snapshot.result_data if snapshot.status is JobStatus.COMPLETED else None
        metrics.count_invocation()
        return {"data": data, "details": _invoke_details(snapshot)}

    def _post_process_only(
        identifier: str, fdef: qdsl.FunctionDef, body: InvokeBody, user: User
    ) -> dict[str, Any]:
        # (7) short-circuit: re-run the pipeline over a stored job's counts.
        try:
            job = jobs.get(body.jobId, caller=user)
        except DomainError as exc:
            raise _api_error(exc) from exc
        if job.status is not JobStatus.COMPLETED or job.counts is None:
            raise ApiError(
                422, "ValidationError",
                f"job '{job.job_id}' has no stored counts (status {job.status.value})",
            )
        try:
            bindings = qdsl.preprocess(fdef, body.input, partial=True)
        except qdsl.InputError as exc:
            raise ApiError(422, type(exc).__name__, str(exc)) from exc
        try:
            result = qdsl.postprocess(job.counts, fdef.post_pipeline, bindings)
        except (qdsl.PipelineTypeError, qdsl.EvalError) as exc:
            raise ApiError(422, type(exc).__name__, str(exc)) from exc
        details = _invoke_details(job)
        details["postProcessOnly"] = True
        return {"data": result.data, "details": details}

    def _make_mirror(job_id: str, fdef: qdsl.FunctionDef, bindings: dict[str, int]):
        """Mirror provider handle transitions into the job record."""

        def mirror(handle) -> None:
            try:
                if handle.state is HandleState.RUNNING:
                    jobs.transition(job_id, JobStatus.RUNNING)
                elif handle.state is HandleState.DONE:
                    counts = handle.result.counts
                    try:
                        post = qdsl.postprocess(counts, fdef.post_pipeline, bindings)
                        jobs.transition(
                            job_id, JobStatus.COMPLETED, counts=counts, result_data=post.data
                        )
                        metrics.count_job_completed()
                    except (qdsl.PipelineTypeError, qdsl.EvalError) as exc:
                        jobs.transition(
                            job_id, JobStatus.FAILED, error=f"post-processing failed: {exc}"
                        )
                        metrics.count_job_failed()
                elif handle.state is HandleState.FAILED:
                    jobs.transition(
                        job_id, JobStatus.FAILED, error=handle.error or "execution failed"
                    )
                    metrics.count_job_failed()
            except (IllegalTransition, UnknownJob):
                log.exception("job mirror out of sync for %s", job_id)

        return mirror

    # -- jobs --------------------------------------------------------------------

    @app.get("/api/job/{job_id}")
    def get_job(job_id: str, request: Request):
        try:
            job = jobs.get(job_id, caller=current_user(request))
        except DomainError as exc:
            raise _api_error(exc) from exc
        return _job_json(job)

    @app.get("/api/jobs")
    def list_jobs(
        request: Request,
        owner: str | None = None,
        status: str | None = None,
        function: str | None = None,
        offset: int = 0,
        limit: int = 50,
    ):
        parsed_status = None
        if status is not None:
            try:
                parsed_status = JobStatus(status)
            except ValueError:
                raise ApiError(
                    422, "ValidationError",
                    f"unknown status {status!r}; expected one of "
                    + ", ".join(s.value for s in JobStatus),
                ) from None
        page, total = jobs.list(
            caller=current_user(request),
            owner=owner,
            function=function,
            status=parsed_status,
            offset=max(offset, 0),
            limit=max(min(limit, 500), 1),
        )
        return {
            "jobs": [_job_json(j) for j in page],
            "total": total,
            "offset": max(offset, 0),
            "limit": max(min(limit, 500), 1),
        }

    # -- backends and metrics ------------------------------------------------------

    @app.get("/api/backends")
    def list_backends(request: Request):
        return {"backends": [_backend_json(b) for b in runtime.list_backends()]}

    @app.get("/metrics")
    def get_metrics():
        return PlainTextResponse(metrics.render(runtime.queue_depths()))

    # -- dashboard assets ------------------------------------------------------------

    ui_dir = config.ui_dir
    if ui_dir is None:
        candidate = Path("frontend") / "dist"
        ui_dir = candidate if candidate.is_dir() else None
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
