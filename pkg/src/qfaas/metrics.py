"""Monotone service counters exposed at /metrics as plain text.

Counter lines follow the usual exposition format: bare names for scalars,
``name{label="value"}`` for per-backend and per-status-code families.
``queue_depth`` is a gauge sourced live from the provider runtime.
"""

from __future__ import annotations

import threading
from collections import Counter


class Metrics:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.invocations_total = 0
        self.jobs_completed_total = 0
        self.jobs_failed_total = 0
        self._http: Counter[int] = Counter()

    def count_invocation(self) -> None:
        with self._lock:
            self.invocations_total += 1

    def count_job_completed(self) -> None:
        with self._lock:
            self.jobs_completed_total += 1

    def count_job_failed(self) -> None:
        with self._lock:
            self.jobs_failed_total += 1

    def count_http(self, status_code: int) -> None:
        with self._lock:
            self._http[status_code] += 1

    def render(self, queue_depths: dict[str, int]) -> str:
        with self._lock:
            lines = [
                f"invocations_total {self.invocations_total}",
                f"jobs_completed_total {self.jobs_completed_total}",
                f"jobs_failed_total {self.jobs_failed_total}",
            ]
            for backend in sorted(queue_depths):
                lines.append(f'queue_depth{{backend="{backend}"}} {queue_depths[backend]}')
            for code in sorted(self._http):
                lines.append(f'http_requests_total{{code="{code}"}} {self._http[code]}')
        return "\n".join(lines) + "\n"
