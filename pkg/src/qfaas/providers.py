"""Backend catalog and the execution runtime behind it.

The catalog describes every backend the gateway can reach: the built-in
``local`` provider, which runs circuits directly on the statevector engine's
worker pool, and mock remote providers, which model a cloud queue.

A mock backend behaves like a FIFO single-server queue: a submitted job waits
``queue_length x avg_seconds_per_job`` for the jobs ahead of it to drain,
then occupies the backend for ``avg_seconds_per_job`` of simulated service,
during which the circuit actually executes on the engine with the backend's
readout noise.  A 100 ms scheduler tick advances handle states, so observed
waits are deterministic within one tick.
"""

from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import simulator
from .auth import ROLES, User
from .circuit import Circuit, CircuitStats
from .errors import (
    BackendDown,
    CapacityExceeded,
    InsufficientQubits,
    PermissionDenied,
    UnknownBackend,
    UnknownHandle,
)

LOCAL_PROVIDER = "local"
SCHEDULER_TICK_SECONDS = 0.1

KINDS = ("qpu", "simulator")


@dataclass(frozen=True)
class BackendInfo:
    """Capabilities, status, and queue state of one backend."""

    name: str
    provider: str
    kind: str  # "qpu" | "simulator"
    qubits: int
    operational: bool = True
    queue_length: int = 0
    avg_seconds_per_job: float = 0.0
    readout_flip_p: float = 0.0
    allowed_roles: tuple[str, ...] = ROLES

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"backend kind must be one of {KINDS}, got {self.kind!r}")
        if self.qubits < 1:
            raise ValueError("backend qubit count must be positive")
        if not (0.0 <= self.readout_flip_p <= 1.0):
            raise ValueError("readout_flip_p must be within [0, 1]")
        if self.avg_seconds_per_job < 0:
            raise ValueError("avg_seconds_per_job must be nonnegative")
        object.__setattr__(self, "allowed_roles", tuple(self.allowed_roles))


DEFAULT_CATALOG = (
    BackendInfo("local-sv", LOCAL_PROVIDER, "simulator", qubits=24),
    BackendInfo(
        "mock-ibm-q5", "mock-ibm", "qpu", qubits=5,
        avg_seconds_per_job=2.0, readout_flip_p=0.02,
    ),
    BackendInfo(
        "mock-braket-sv", "mock-braket", "simulator", qubits=20,
        avg_seconds_per_job=1.0,
    ),
)


@dataclass(frozen=True)
class ProviderCatalog:
    backends: tuple[BackendInfo, ...]

    def __post_init__(self) -> None:
        names = [b.name for b in self.backends]
        if len(names) != len(set(names)):
            raise ValueError("backend names must be unique")
        object.__setattr__(self, "backends", tuple(self.backends))

    def get(self, name: str) -> BackendInfo | None:
        for backend in self.backends:
            if backend.name == name:
                return backend
        return None

    @classmethod
    def default(cls) -> "ProviderCatalog":
        return cls(DEFAULT_CATALOG)

    @classmethod
    def from_file(cls, path: Path | str) -> "ProviderCatalog":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        backends = []
        for entry in doc["backends"]:
            backends.append(
                BackendInfo(
                    name=entry["name"],
                    provider=entry["provider"],
                    kind=entry["kind"],
                    qubits=int(entry["qubits"]),
                    operational=bool(entry.get("operational", True)),
                    avg_seconds_per_job=float(entry.get("avg_seconds_per_job", 0.0)),
                    readout_flip_p=float(entry.get("readout_flip_p", 0.0)),
                    allowed_roles=tuple(entry.get("allowed_roles", ROLES)),
                )
            )
        return cls(tuple(backends))


def rejection_reason(info: BackendInfo, user: User, width: int) -> str | None:
    """Why this backend cannot serve this user's circuit; None when it can."""
    if not info.operational:
        return "backend is not operational"
    if user.role not in info.allowed_roles:
        return f"role '{user.role}' is not permitted"
    if info.qubits < width:
        return f"needs {width} qubits, backend has {info.qubits}"
    return None


class HandleState(str, Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


TERMINAL_HANDLE_STATES = frozenset({HandleState.DONE, HandleState.FAILED})


@dataclass(frozen=True)
class ProviderJobHandle:
    """Immutable snapshot of a submitted job at the provider."""

    handle_id: str
    backend_name: str
    state: HandleState
    ready_at: float  # epoch seconds at which service begins
    result: simulator.ExecutionResult | None = None
    error: str | None = None


TransitionListener = Callable[[ProviderJobHandle], None]


@dataclass
class _HandleRec:
    handle_id: str
    backend: BackendInfo
    circuit: Circuit
    shots: int
    seed: int | None
    state: HandleState
    ready_at: float
    service_ends_at: float
    listener: TransitionListener | None
    result: simulator.ExecutionResult | None = None
    error: str | None = None
    dispatched: bool = False

    def snapshot(self) -> ProviderJobHandle:
        return ProviderJobHandle(
            self.handle_id, self.backend.name, self.state, self.ready_at,
            self.result, self.error,
        )


class ProviderRuntime:
    """Handle table, queue counters, and the tick scheduler.

    The scheduler thread is the single writer of the queued->running edge for
    mock backends; worker-pool threads own running->done/failed.  Queue
    counters and handle state live behind one lock; listeners fire outside it
    and in state order per handle.
    """

    def __init__(
        self,
        catalog: ProviderCatalog | None = None,
        sim_workers: int = 4,
        max_in_flight: int = 64,
        tick_seconds: float = SCHEDULER_TICK_SECONDS,
    ):
        self.catalog = catalog or ProviderCatalog.default()
        self.max_in_flight = max_in_flight
        self.tick_seconds = tick_seconds
        self._lock = threading.Lock()
        self._handles: dict[str, _HandleRec] = {}
        self._queue_len: dict[str, int] = {b.name: 0 for b in self.catalog.backends}
        self._in_flight: dict[str, int] = {b.provider: 0 for b in self.catalog.backends}
        self._pool = ThreadPoolExecutor(max_workers=sim_workers, thread_name_prefix="sim")
        self._stop = threading.Event()
        self._ticker = threading.Thread(target=self._tick_loop, daemon=True, name="provider-tick")
        self._ticker.start()

    # -- catalog views -------------------------------------------------------

    def _live(self, info: BackendInfo) -> BackendInfo:
        return replace(info, queue_length=self._queue_len.get(info.name, 0))

    def list_backends(
        self,
        provider: str | None = None,
        kind: str | None = None,
        operational: bool | None = None,
    ) -> list[BackendInfo]:
        """Catalog snapshot with live queue lengths, ordered by name."""
        with self._lock:
            out = [self._live(b) for b in self.catalog.backends]
        if provider is not None:
            out = [b for b in out if b.provider == provider]
        if kind is not None:
            out = [b for b in out if b.kind == kind]
        if operational is not None:
            out = [b for b in out if b.operational == operational]
        return sorted(out, key=lambda b: b.name)

    def get_backend(self, name: str) -> BackendInfo | None:
        info = self.catalog.get(name)
        if info is None:
            return None
        with self._lock:
            return self._live(info)

    def queue_depths(self) -> dict[str, int]:
        with self._lock:
            return dict(self._queue_len)

    def verify_backend(self, user: User, backend_name: str, stats: CircuitStats) -> BackendInfo:
        """The submission gate: exists, operational, permitted, big enough."""
        info = self.get_backend(backend_name)
        if info is None:
            raise UnknownBackend(f"backend '{backend_name}' does not exist")
        reason = rejection_reason(info, user, stats.width)
        if reason is None:
            return info
        if not info.operational:
            raise BackendDown(f"backend '{backend_name}' is not operational")
        if user.role not in info.allowed_roles:
            raise PermissionDenied(
                f"role '{user.role}' may not use backend '{backend_name}'"
            )
        raise InsufficientQubits(
            f"circuit needs {stats.width} qubits, backend '{backend_name}' has {info.qubits}"
        )

    # -- submission ----------------------------------------------------------

    def submit(
        self,
        backend: BackendInfo | str,
        circuit: Circuit,
        shots: int,
        seed: int | None = None,
        listener: TransitionListener | None = None,
    ) -> ProviderJobHandle:
        name = backend.name if isinstance(backend, BackendInfo) else backend
        info = self.catalog.get(name)
        if info is None:
            raise UnknownBackend(f"backend '{name}' does not exist")

        with self._lock:
            if self._in_flight[info.provider] >= self.max_in_flight:
                raise CapacityExceeded(
                    f"provider '{info.provider}' already has {self.max_in_flight} jobs in flight"
                )
            now = time.time()
            ahead = self._queue_len[info.name]
            if info.provider == LOCAL_PROVIDER:
                ready_at = now
                service_ends_at = now
            else:
                ready_at = now + ahead * info.avg_seconds_per_job
                service_ends_at = ready_at + info.avg_seconds_per_job
            rec = _HandleRec(
                handle_id=uuid.uuid4().hex,
                backend=info,
                circuit=circuit,
                shots=shots,
                seed=seed,
                state=HandleState.QUEUED,
                ready_at=ready_at,
                service_ends_at=service_ends_at,
                listener=listener,
            )
            self._handles[rec.handle_id] = rec
            self._queue_len[info.name] += 1
            self._in_flight[info.provider] += 1
            snap = rec.snapshot()

        if info.provider == LOCAL_PROVIDER:
            self._pool.submit(self._run_local, rec)
        return snap

    def poll(self, handle_id: str) -> ProviderJobHandle:
        with self._lock:
            rec = self._handles.get(handle_id)
            if rec is None:
                raise UnknownHandle(f"no such handle '{handle_id}'")
            return rec.snapshot()

    # -- execution -----------------------------------------------------------

    def _notify(self, rec: _HandleRec) -> None:
        if rec.listener is None:
            return
        try:
            rec.listener(rec.snapshot())
        except Exception:  # listener bugs must not kill the scheduler
            logging.getLogger(__name__).exception(
                "transition listener failed for handle %s", rec.handle_id
            )

    def _finish(self, rec: _HandleRec, result: simulator.ExecutionResult | None, error: str | None) -> None:
        with self._lock:
            rec.state = HandleState.DONE if error is None else HandleState.FAILED
            rec.result = result
            rec.error = error
            self._queue_len[rec.backend.name] -= 1
            self._in_flight[rec.backend.provider] -= 1
        self._notify(rec)

    def _execute(self, rec: _HandleRec) -> None:
        try:
            result = simulator.execute(
                rec.circuit,
                rec.shots,
                seed=rec.seed,
                readout_flip_p=rec.backend.readout_flip_p,
                backend_name=rec.backend.name,
            )
            self._finish(rec, result, None)
        except Exception as exc:
            self._finish(rec, None, str(exc))

    def _run_local(self, rec: _HandleRec) -> None:
        with self._lock:
            rec.state = HandleState.RUNNING
        self._notify(rec)
        self._execute(rec)

    def _tick_loop(self) -> None:
        while not self._stop.wait(self.tick_seconds):
            now = time.time()
            promote: list[_HandleRec] = []
            finish: list[_HandleRec] = []
            with self._lock:
                for rec in self._handles.values():
                    if rec.backend.provider == LOCAL_PROVIDER:
                        continue
                    if rec.state is HandleState.QUEUED and now >= rec.ready_at:
                        rec.state = HandleState.RUNNING
                        promote.append(rec)
                    elif (
                        rec.state is HandleState.RUNNING
                        and not rec.dispatched
                        and now >= rec.service_ends_at
                    ):
                        rec.dispatched = True
                        finish.append(rec)
            for rec in promote:
                self._notify(rec)
            for rec in finish:
                self._pool.submit(self._execute, rec)

    def close(self) -> None:
        self._stop.set()
        self._ticker.join(timeout=2.0)
        self._pool.shutdown(wait=True, cancel_futures=True)
