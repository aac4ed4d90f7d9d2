"""Function records and the staged deployment pipeline.

Every function gets the identifier ``<template>-<name>`` and moves through
three stages whenever it is created or updated:

- **Validate** parses the Base64-decoded source; parser and static
  diagnostics land in the stage log.
- **Build** smoke-compiles the template (default/min bindings) into a
  circuit and validates it.
- **Deploy** publishes the invocation route and marks the record Ready.

A failed stage halts the rest and takes the function out of service; stage
logs and the full deployment history stay queryable.  ``requirements`` and
``handlerQs`` blobs are stored verbatim for API fidelity but never executed.
"""

from __future__ import annotations

import base64
import binascii
import logging
import re
import threading
import time
from concurrent.futures import Executor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from . import qdsl
from .auth import User
from .circuit import stats as circuit_stats
from .circuit import to_text
from .errors import BadRequest, Conflict, PermissionDenied, UnknownFunction
from .qdsl import FunctionDef, TEMPLATE_TAGS
from .storage import JsonDirStore

_FUNCTION_SCHEMA = "qfaas.function.v1"

NAME_RE = re.compile(r"^[a-z][a-z0-9-]{0,62}$")

STAGE_NAMES = ("Validate", "Build", "Deploy")

STATUS_REGISTERED = "Registered"
STATUS_VALIDATING = "Validating"
STATUS_BUILDING = "Building"
STATUS_DEPLOYING = "Deploying"
STATUS_READY = "Ready"
STATUS_FAILED = "FailedDeploy"


@dataclass
class StageResult:
    name: str
    status: str = "pending"  # pending | running | passed | failed
    log: str = ""
    at: float | None = None

    def to_doc(self) -> dict[str, Any]:
        return {"name": self.name, "status": self.status, "log": self.log, "at": self.at}

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "StageResult":
        return cls(doc["name"], doc["status"], doc.get("log", ""), doc.get("at"))


@dataclass
class DeploymentRecord:
    identifier: str
    version: int
    stages: list[StageResult]
    started_at: float
    finished_at: float | None = None

    @property
    def terminal(self) -> bool:
        return all(s.status == "passed" for s in self.stages) or any(
            s.status == "failed" for s in self.stages
        )

    def to_doc(self) -> dict[str, Any]:
        return {
            "identifier": self.identifier,
            "version": self.version,
            "stages": [s.to_doc() for s in self.stages],
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "DeploymentRecord":
        return cls(
            doc["identifier"],
            doc["version"],
            [StageResult.from_doc(s) for s in doc["stages"]],
            doc["started_at"],
            doc.get("finished_at"),
        )


@dataclass
class FunctionRecord:
    identifier: str
    name: str
    template: str
    author: str
    public: bool
    source_b64: str
    requirements_b64: str = ""
    handler_qs_b64: str = ""
    version: int = 1
    status: str = STATUS_REGISTERED
    created_at: float = 0.0
    updated_at: float = 0.0
    compiled: FunctionDef | None = None  # present iff status == Ready
    deployments: list[DeploymentRecord] = field(default_factory=list)
    history: list[dict[str, Any]] = field(default_factory=list)

    def to_doc(self) -> dict[str, Any]:
        return {
            "schema": _FUNCTION_SCHEMA,
            "identifier": self.identifier,
            "name": self.name,
            "template": self.template,
            "author": self.author,
            "public": self.public,
            "source_b64": self.source_b64,
            "requirements_b64": self.requirements_b64,
            "handler_qs_b64": self.handler_qs_b64,
            "version": self.version,
            "status": self.status,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "deployments": [d.to_doc() for d in self.deployments],
            "history": self.history,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "FunctionRecord":
        return cls(
            identifier=doc["identifier"],
            name=doc["name"],
            template=doc["template"],
            author=doc["author"],
            public=doc["public"],
            source_b64=doc["source_b64"],
            requirements_b64=doc.get("requirements_b64", ""),
            handler_qs_b64=doc.get("handler_qs_b64", ""),
            version=doc["version"],
            status=doc["status"],
            created_at=doc["created_at"],
            updated_at=doc["updated_at"],
            deployments=[DeploymentRecord.from_doc(d) for d in doc.get("deployments", [])],
            history=doc.get("history", []),
        )


def _decode_b64(blob: str, what: str) -> bytes:
    try:
        return base64.b64decode(blob, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise BadRequest(f"{what} is not valid Base64: {exc}") from exc


def smoke_bindings(fdef: FunctionDef) -> dict[str, int]:
    """Representative bindings for the Build stage: default, else min/max, else 1."""
    bindings = {}
    for p in fdef.params:
        if p.default is not None:
            bindings[p.name] = p.default
        elif p.min is not None:
            bindings[p.name] = p.min
        elif p.max is not None:
            bindings[p.name] = p.max
        else:
            bindings[p.name] = 1
    return bindings


class Registry:
    """Function store with per-identifier serialized writes."""

    def __init__(self, data_dir: Path | str, executor: Executor | None = None):
        self._store = JsonDirStore(Path(data_dir) / "functions")
        self._executor = executor
        self._lock = threading.RLock()
        self._id_locks: dict[str, threading.RLock] = {}
        self._records: dict[str, FunctionRecord] = {}
        for key, doc in self._store.load_all().items():
            record = FunctionRecord.from_doc(doc)
            if record.status == STATUS_READY:
                # compiled is rebuilt, not persisted; Ready records re-parse.
                try:
                    record.compiled = qdsl.parse(
                        _decode_b64(record.source_b64, "source").decode("utf-8")
                    )
                except Exception:
                    record.status = STATUS_FAILED
            self._records[record.identifier] = record

    def _id_lock(self, identifier: str) -> threading.RLock:
        with self._lock:
            return self._id_locks.setdefault(identifier, threading.RLock())

    def _persist(self, record: FunctionRecord) -> None:
        record.updated_at = time.time()
        self._store.write(record.identifier, record.to_doc())
        self._records[record.identifier] = record

    # -- creation / update ---------------------------------------------------

    def create_function(
        self,
        *,
        name: str,
        template: str,
        handler_b64: str,
        requirements_b64: str = "",
        handler_qs_b64: str = "",
        public: bool,
        author: str | None = None,
        caller: User,
    ) -> FunctionRecord:
        if caller.role not in ("developer", "admin"):
            raise PermissionDenied("only developers and admins may deploy functions")
        if not NAME_RE.match(name):
            raise BadRequest(
                f"function name {name!r} must match {NAME_RE.pattern}"
            )
        if template not in TEMPLATE_TAGS:
            raise BadRequest(
                f"template {template!r} must be one of {', '.join(TEMPLATE_TAGS)}"
            )
        _decode_b64(handler_b64, "handlerPy")
        if requirements_b64:
            _decode_b64(requirements_b64, "requirements")
        if handler_qs_b64:
            _decode_b64(handler_qs_b64, "handlerQs")

        identifier = f"{template}-{name}"
        now = time.time()
        record = FunctionRecord(
            identifier=identifier,
            name=name,
            template=template,
            author=author or caller.username,
            public=public,
            source_b64=handler_b64,
            requirements_b64=requirements_b64,
            handler_qs_b64=handler_qs_b64,
            version=1,
            status=STATUS_REGISTERED,
            created_at=now,
            updated_at=now,
        )
        with self._lock:
            if identifier in self._records:
                raise Conflict(f"function '{identifier}' already exists")
            self._persist(record)
        self._schedule_pipeline(identifier)
        return record

    def update_function(
        self,
        identifier: str,
        *,
        handler_b64: str | None = None,
        requirements_b64: str | None = None,
        handler_qs_b64: str | None = None,
        public: bool | None = None,
        caller: User,
    ) -> FunctionRecord:
        with self._id_lock(identifier):
            record = self._records.get(identifier)
            if record is None:
                raise UnknownFunction(f"no function '{identifier}'")
            if not caller.is_admin and caller.username != record.author:
                raise PermissionDenied("only the author or an admin may update a function")
            if handler_b64 is not None:
                _decode_b64(handler_b64, "handlerPy")
            record.history.append(
                {
                    "version": record.version,
                    "source_b64": record.source_b64,
                    "requirements_b64": record.requirements_b64,
                    "handler_qs_b64": record.handler_qs_b64,
                    "public": record.public,
                    "at": time.time(),
                }
            )
            record.version += 1
            if handler_b64 is not None:
                record.source_b64 = handler_b64
            if requirements_b64 is not None:
                record.requirements_b64 = requirements_b64
            if handler_qs_b64 is not None:
                record.handler_qs_b64 = handler_qs_b64
            if public is not None:
                record.public = public
            record.status = STATUS_REGISTERED
            record.compiled = None
            self._persist(record)
        self._schedule_pipeline(identifier)
        return record

    def _schedule_pipeline(self, identifier: str) -> None:
        if self._executor is None:
            self.run_pipeline(identifier)
        else:
            self._executor.submit(self._pipeline_guarded, identifier)

    def _pipeline_guarded(self, identifier: str) -> None:
        try:
            self.run_pipeline(identifier)
        except Exception:  # pipeline crashes must not kill the worker
            logging.getLogger(__name__).exception("pipeline failed for %s", identifier)

    # -- pipeline -------------------------------------------------------------

    def run_pipeline(self, identifier: str) -> DeploymentRecord:
        """Validate -> Build -> Deploy; a failed stage halts the rest."""
        with self._id_lock(identifier):
            record = self._records.get(identifier)
            if record is None:
                raise UnknownFunction(f"no function '{identifier}'")
            deployment = DeploymentRecord(
                identifier=identifier,
                version=record.version,
                stages=[StageResult(name) for name in STAGE_NAMES],
                started_at=time.time(),
            )
            record.deployments.append(deployment)
            stage_by_name = {s.name: s for s in deployment.stages}

            def enter(stage_name: str, record_status: str) -> StageResult:
                stage = stage_by_name[stage_name]
                stage.status = "running"
                stage.at = time.time()
                record.status = record_status
                self._persist(record)
                return stage

            def fail(stage: StageResult, log: str) -> DeploymentRecord:
                stage.status = "failed"
                stage.log = log
                deployment.finished_at = time.time()
                record.status = STATUS_FAILED
                record.compiled = None
                self._persist(record)
                return deployment

            # Validate: decode and parse the declarative source.
            stage = enter("Validate", STATUS_VALIDATING)
            try:
                source = _decode_b64(record.source_b64, "source").decode("utf-8")
            except (BadRequest, UnicodeDecodeError) as exc:
                return fail(stage, f"source decode failed: {exc}")
            try:
                fdef = qdsl.parse(source)
            except qdsl.ParseError as exc:
                return fail(stage, f"parse error: {exc}")
            except qdsl.StaticError as exc:
                return fail(stage, f"static check failed: {exc}")
            stage.status = "passed"
            stage.log = (
                f"parsed function '{fdef.name}' (template {fdef.template}, "
                f"{len(fdef.params)} param(s))"
            )

            # Build: smoke-compile with representative bindings.
            stage = enter("Build", STATUS_BUILDING)
            bindings = smoke_bindings(fdef)
            try:
                circuit = qdsl.instantiate(fdef, bindings)
                built = circuit_stats(circuit)
            except qdsl.EvalError as exc:
                return fail(stage, f"smoke compile with bindings {bindings} failed: {exc}")
            stage.status = "passed"
            stage.log = (
                f"compiled with bindings {bindings}: {built.width} qubit(s), "
                f"{built.gate_count} gate(s), depth {built.depth}"
            )

            # Deploy: publish the route.
            stage = enter("Deploy", STATUS_DEPLOYING)
            record.compiled = fdef
            record.status = STATUS_READY
            stage.status = "passed"
            stage.log = f"invocation route /api/function/{identifier} published"
            deployment.finished_at = time.time()
            self._persist(record)
            return deployment

    # -- retrieval ------------------------------------------------------------

    def get_any(self, identifier: str) -> FunctionRecord:
        """Unchecked lookup for internal callers."""
        record = self._records.get(identifier)
        if record is None:
            raise UnknownFunction(f"no function '{identifier}'")
        return record

    def get(self, identifier: str, caller: User) -> FunctionRecord:
        record = self.get_any(identifier)
        if record.public or caller.is_admin or caller.username == record.author:
            return record
        raise PermissionDenied(f"function '{identifier}' is private")

    def list(self, caller: User) -> list[FunctionRecord]:
        """Admin: everything.  Others: own records plus public Ready ones."""
        out = []
        for record in self._records.values():
            if caller.is_admin or record.author == caller.username:
                out.append(record)
            elif record.public and record.status == STATUS_READY:
                out.append(record)
        return sorted(out, key=lambda r: r.identifier)

    def delete(self, identifier: str, caller: User) -> None:
        with self._id_lock(identifier):
            record = self._records.get(identifier)
            if record is None:
                raise UnknownFunction(f"no function '{identifier}'")
            if not caller.is_admin and caller.username != record.author:
                raise PermissionDenied("only the author or an admin may delete a function")
            self._store.delete(identifier)
            self._records.pop(identifier, None)

    def deployments(self, identifier: str) -> list[DeploymentRecord]:
        return list(self.get_any(identifier).deployments)

    def wait_terminal(self, identifier: str, timeout: float = 10.0) -> FunctionRecord:
        """Poll until the latest pipeline run lands; convenience for callers."""
        deadline = time.time() + timeout
        while time.time() < deadline:
            record = self.get_any(identifier)
            if record.status in (STATUS_READY, STATUS_FAILED):
                return record
            time.sleep(0.02)
        return self.get_any(identifier)
