"""Durable job lifecycle.

A job is one invoked execution request, tracked from creation to a terminal
state.  Legal transitions form a small DAG::

    Created -> Queued -> Running -> Completed
                    \\         \\-> Failed
                     \\-> Failed

Every accepted write is fsynced to ``data/jobs/`` before it is acknowledged,
so a crash between any two operations loses nothing.  ``await_result`` blocks
until the job turns terminal or a waiting threshold (default one minute)
elapses, then returns a snapshot either way; the job itself keeps going and
can be retrieved later by its ID.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

from .auth import User
from .errors import IllegalTransition, PermissionDenied, UnknownJob
from .storage import JsonDirStore

DEFAULT_THRESHOLD_MS = 60_000

_JOB_SCHEMA = "qfaas.job.v1"


class JobStatus(str, Enum):
    CREATED = "Created"
    QUEUED = "Queued"
    RUNNING = "Running"
    COMPLETED = "Completed"
    FAILED = "Failed"


LEGAL_EDGES: dict[JobStatus, frozenset[JobStatus]] = {
    JobStatus.CREATED: frozenset({JobStatus.QUEUED}),
    JobStatus.QUEUED: frozenset({JobStatus.RUNNING, JobStatus.FAILED}),
    JobStatus.RUNNING: frozenset({JobStatus.COMPLETED, JobStatus.FAILED}),
    JobStatus.COMPLETED: frozenset(),
    JobStatus.FAILED: frozenset(),
}

TERMINAL_STATUSES = frozenset({JobStatus.COMPLETED, JobStatus.FAILED})

_UNSET = object()


@dataclass(frozen=True)
class Job:
    job_id: str
    function_identifier: str
    owner: str
    backend_name: str
    provider: str
    shots: int
    seed: int
    status: JobStatus
    submitted_at: float
    queued_at: float | None = None
    started_at: float | None = None
    finished_at: float | None = None
    counts: dict[str, int] | None = None
    result_data: Any = None
    error: str | None = None
    waiting_ms: float | None = None
    running_ms: float | None = None
    circuit_text: str = ""

    @property
    def terminal(self) -> bool:
        return self.status in TERMINAL_STATUSES

    def to_doc(self) -> dict[str, Any]:
        return {
            "schema": _JOB_SCHEMA,
            "job_id": self.job_id,
            "function_identifier": self.function_identifier,
            "owner": self.owner,
            "backend_name": self.backend_name,
            "provider": self.provider,
            "shots": self.shots,
            "seed": self.seed,
            "status": self.status.value,
            "submitted_at": self.submitted_at,
            "queued_at": self.queued_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "counts": self.counts,
            "result_data": self.result_data,
            "error": self.error,
            "waiting_ms": self.waiting_ms,
            "running_ms": self.running_ms,
            "circuit_text": self.circuit_text,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "Job":
        return cls(
            job_id=doc["job_id"],
            function_identifier=doc["function_identifier"],
            owner=doc["owner"],
            backend_name=doc["backend_name"],
            provider=doc["provider"],
            shots=doc["shots"],
            seed=doc["seed"],
            status=JobStatus(doc["status"]),
            submitted_at=doc["submitted_at"],
            queued_at=doc.get("queued_at"),
            started_at=doc.get("started_at"),
            finished_at=doc.get("finished_at"),
            counts=doc.get("counts"),
            result_data=doc.get("result_data"),
            error=doc.get("error"),
            waiting_ms=doc.get("waiting_ms"),
            running_ms=doc.get("running_ms"),
            circuit_text=doc.get("circuit_text", ""),
        )


class JobStore:
    """In-memory job table mirrored one file per job under the data dir."""

    def __init__(self, data_dir: Path | str):
        self._store = JsonDirStore(Path(data_dir) / "jobs")
        self._lock = threading.RLock()
        self._jobs: dict[str, Job] = {}
        self._by_owner: dict[str, set[str]] = {}
        self._terminal_events: dict[str, threading.Event] = {}
        for key, doc in self._store.load_all().items():
            job = Job.from_doc(doc)
            self._jobs[job.job_id] = job
            self._by_owner.setdefault(job.owner, set()).add(job.job_id)

    def _persist(self, job: Job) -> None:
        # Write-ahead: hit disk before the in-memory table acknowledges.
        self._store.write(job.job_id, job.to_doc())
        self._jobs[job.job_id] = job
        self._by_owner.setdefault(job.owner, set()).add(job.job_id)

    def create(
        self,
        function_identifier: str,
        owner: str,
        backend_name: str,
        provider: str,
        shots: int,
        seed: int,
        circuit_text: str = "",
    ) -> Job:
        job = Job(
            job_id=str(uuid.uuid4()),
            function_identifier=function_identifier,
            owner=owner,
            backend_name=backend_name,
            provider=provider,
            shots=shots,
            seed=seed,
            status=JobStatus.CREATED,
            submitted_at=time.time(),
            circuit_text=circuit_text,
        )
        with self._lock:
            self._persist(job)
        return job

    def transition(
        self,
        job_id: str,
        to: JobStatus,
        *,
        counts: dict[str, int] | None = None,
        result_data: Any = _UNSET,
        error: str | None = None,
    ) -> Job:
        """Atomically advance a job along a legal edge.

        Completed requires counts plus post-processed result data; Failed
        requires an error message.  Timestamps and the waiting/running spans
        are stamped as states are entered and left.
        """
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise UnknownJob(f"no such job '{job_id}'")
            if to not in LEGAL_EDGES[job.status]:
                raise IllegalTransition(job.status.value, to.value)
            if to is JobStatus.COMPLETED and (counts is None or result_data is _UNSET):
                raise IllegalTransition(
                    job.status.value, to.value, "Completed requires counts and result data"
                )
            if to is JobStatus.FAILED and not error:
                raise IllegalTransition(
                    job.status.value, to.value, "Failed requires an error message"
                )

            now = time.time()
            changes: dict[str, Any] = {"status": to}
            if to is JobStatus.QUEUED:
                changes["queued_at"] = now
            elif to is JobStatus.RUNNING:
                changes["started_at"] = now
                if job.queued_at is not None:
                    changes["waiting_ms"] = (now - job.queued_at) * 1000.0
            else:  # terminal
                changes["finished_at"] = now
                if job.status is JobStatus.QUEUED and job.queued_at is not None:
                    changes["waiting_ms"] = (now - job.queued_at) * 1000.0
                if job.status is JobStatus.RUNNING and job.started_at is not None:
                    changes["running_ms"] = (now - job.started_at) * 1000.0
                if to is JobStatus.COMPLETED:
                    changes["counts"] = dict(counts)
                    changes["result_data"] = result_data
                else:
                    changes["error"] = error

            updated = replace(job, **changes)
            self._persist(updated)
            if updated.terminal:
                self._terminal_events.setdefault(job_id, threading.Event()).set()
            return updated

    def _event(self, job_id: str) -> threading.Event:
        with self._lock:
            event = self._terminal_events.setdefault(job_id, threading.Event())
            job = self._jobs.get(job_id)
            if job is not None and job.terminal:
                event.set()
            return event

    def await_result(self, job_id: str, threshold_ms: float = DEFAULT_THRESHOLD_MS) -> Job:
        """Snapshot once the job is terminal, or after the threshold passes.

        The job is never cancelled; a non-terminal snapshot just means the
        caller should come back later with the job ID.
        """
        with self._lock:
            if job_id not in self._jobs:
                raise UnknownJob(f"no such job '{job_id}'")
        event = self._event(job_id)
        event.wait(timeout=threshold_ms / 1000.0)
        return self.get(job_id)

    def get(self, job_id: str, caller: User | None = None) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise UnknownJob(f"no such job '{job_id}'")
        if caller is not None and not caller.is_admin and job.owner != caller.username:
            raise PermissionDenied(f"job '{job_id}' belongs to another user")
        return job

    def list(
        self,
        caller: User,
        owner: str | None = None,
        function: str | None = None,
        status: JobStatus | None = None,
        offset: int = 0,
        limit: int = 50,
    ) -> tuple[list[Job], int]:
        """Newest-first page of jobs visible to the caller."""
        if not caller.is_admin:
            owner = caller.username
        with self._lock:
            jobs = list(self._jobs.values())
        if owner is not None:
            jobs = [j for j in jobs if j.owner == owner]
        if function is not None:
            jobs = [j for j in jobs if j.function_identifier == function]
        if status is not None:
            jobs = [j for j in jobs if j.status is status]
        jobs.sort(key=lambda j: (j.submitted_at, j.job_id), reverse=True)
        total = len(jobs)
        return jobs[offset : offset + limit], total
