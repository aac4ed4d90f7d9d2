"""Domain errors shared across backend, job, and function management.

Each class carries a stable ``code`` used verbatim in HTTP error envelopes.
"""

from __future__ import annotations

from typing import Any


class DomainError(Exception):
    code = "Error"


class PermissionDenied(DomainError):
    code = "PermissionDenied"


class UnknownBackend(DomainError):
    code = "UnknownBackend"


class BackendDown(DomainError):
    code = "BackendDown"


class InsufficientQubits(DomainError):
    code = "InsufficientQubits"


class NoEligibleBackend(DomainError):
    code = "NoEligibleBackend"

    def __init__(self, rejections: dict[str, str]):
        self.rejections = dict(rejections)
        summary = "; ".join(f"{name}: {why}" for name, why in sorted(rejections.items()))
        super().__init__(f"no eligible backend ({summary or 'empty catalog'})")


class CapacityExceeded(DomainError):
    code = "CapacityExceeded"


class UnknownHandle(DomainError):
    code = "UnknownHandle"


class UnknownJob(DomainError):
    code = "UnknownJob"


class IllegalTransition(DomainError):
    code = "IllegalTransition"

    def __init__(self, from_status: Any, to_status: Any, reason: str = ""):
        self.from_status = from_status
        self.to_status = to_status
        tail = f" ({reason})" if reason else ""
        super().__init__(f"illegal transition {from_status} -> {to_status}{tail}")


class UnknownFunction(DomainError):
    code = "UnknownFunction"


class Conflict(DomainError):
    code = "Conflict"


class BadRequest(DomainError):
    """Malformed management request (name pattern, template tag, Base64)."""

    code = "ValidationError"
