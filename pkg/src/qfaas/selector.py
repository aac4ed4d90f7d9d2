"""Adaptive backend selection.

Given a circuit's stats and the caller's criteria, filter the catalog down
to the backends that can actually serve the request, then pick the one with
the lowest estimated wait; capacity fit and name break ties, in that order,
so selection is deterministic for any catalog snapshot.

Manual selection (an explicit ``backend_name``) skips ranking entirely and
only verifies the named backend, mirroring the submission gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .auth import User
from .circuit import CircuitStats
from .errors import (
    BackendDown,
    InsufficientQubits,
    NoEligibleBackend,
    PermissionDenied,
    UnknownBackend,
)
from .providers import BackendInfo, ProviderCatalog, rejection_reason


@dataclass(frozen=True)
class SelectionCriteria:
    """Invocation-side preferences; an explicit name always wins."""

    provider: str | None = None
    backend_type: str | None = None  # "qpu" | "simulator"
    backend_name: str | None = None
    auto_select: bool = True


@dataclass(frozen=True)
class SelectionDecision:
    backend: BackendInfo
    estimated_wait_seconds: float
    reason: str


def estimated_wait(info: BackendInfo) -> float:
    return info.queue_length * info.avg_seconds_per_job


def _backends(catalog: ProviderCatalog | Sequence[BackendInfo]) -> list[BackendInfo]:
    if isinstance(catalog, ProviderCatalog):
        return list(catalog.backends)
    return list(catalog)


def _criteria_mismatch(info: BackendInfo, criteria: SelectionCriteria) -> str | None:
    if criteria.backend_name is not None and info.name != criteria.backend_name:
        return f"name differs from requested '{criteria.backend_name}'"
    if criteria.backend_type is not None and info.kind != criteria.backend_type:
        return f"kind '{info.kind}' differs from requested '{criteria.backend_type}'"
    if criteria.provider is not None and info.provider != criteria.provider:
        return f"provider '{info.provider}' differs from requested '{criteria.provider}'"
    return None


def eligible(
    catalog: ProviderCatalog | Sequence[BackendInfo],
    user: User,
    stats: CircuitStats,
    criteria: SelectionCriteria,
) -> list[BackendInfo]:
    """Backends satisfying every predicate, ordered by name."""
    out = []
    for info in _backends(catalog):
        if rejection_reason(info, user, stats.width) is None and (
            _criteria_mismatch(info, criteria) is None
        ):
            out.append(info)
    return sorted(out, key=lambda b: b.name)


def select(
    catalog: ProviderCatalog | Sequence[BackendInfo],
    user: User,
    stats: CircuitStats,
    criteria: SelectionCriteria,
) -> SelectionDecision:
    """Pick a backend, or raise with per-backend rejection reasons.

    Ranking key: (estimated wait, qubit count, name) ascending, i.e. least
    busy first, then the smallest device that still fits, then name order.
    """
    backends = _backends(catalog)

    if criteria.backend_name is not None:
        info = next((b for b in backends if b.name == criteria.backend_name), None)
        if info is None:
            raise UnknownBackend(f"backend '{criteria.backend_name}' does not exist")
        if not info.operational:
            raise BackendDown(f"backend '{info.name}' is not operational")
        if user.role not in info.allowed_roles:
            raise PermissionDenied(f"role '{user.role}' may not use backend '{info.name}'")
        if info.qubits < stats.width:
            raise InsufficientQubits(
                f"circuit needs {stats.width} qubits, backend '{info.name}' has {info.qubits}"
            )
        return SelectionDecision(
            info, estimated_wait(info), f"manually selected backend '{info.name}'"
        )

    chosen = eligible(backends, user, stats, criteria)
    if not chosen:
        rejections = {}
        for info in backends:
            why = rejection_reason(info, user, stats.width) or _criteria_mismatch(info, criteria)
            rejections[info.name] = why or "eligible"
        raise NoEligibleBackend(rejections)

    keys = sorted((estimated_wait(b), b.qubits, b.name) for b in chosen)
    best = next(b for b in chosen if (estimated_wait(b), b.qubits, b.name) == keys[0])
    if len(keys) == 1:
        reason = "only eligible backend"
    elif keys[0][0] < keys[1][0]:
        reason = f"lowest estimated wait ({keys[0][0]:.1f} s)"
    elif keys[0][1] < keys[1][1]:
        reason = "smallest sufficient device among wait ties"
    else:
        reason = "first by name among full ties"
    return SelectionDecision(best, keys[0][0], reason)
