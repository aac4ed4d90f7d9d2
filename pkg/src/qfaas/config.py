"""Server configuration: JSON file plus environment overrides.

Every knob has a default suitable for a laptop deployment; a config file
(``--config`` / ``QFAAS_CONFIG``) overrides the defaults and ``QFAAS_*``
environment variables override the file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping


@dataclass
class Config:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: Path = Path("data")
    catalog_path: Path | None = None  # None -> built-in default catalog
    ui_dir: Path | None = None  # None -> ./frontend/dist when present
    sim_workers: int = 4
    pipeline_workers: int = 2
    max_in_flight: int = 64
    default_threshold_ms: int = 60_000
    token_ttl_seconds: int = 3600
    pbkdf2_iterations: int = 60_000
    scheduler_tick_seconds: float = 0.1
    admin_password: str | None = None
    seed_users: list[dict] = field(default_factory=list)


_ENV_MAP = {
    "QFAAS_HOST": ("host", str),
    "QFAAS_PORT": ("port", int),
    "QFAAS_DATA_DIR": ("data_dir", Path),
    "QFAAS_CATALOG": ("catalog_path", Path),
    "QFAAS_UI_DIR": ("ui_dir", Path),
    "QFAAS_SIM_WORKERS": ("sim_workers", int),
    "QFAAS_PIPELINE_WORKERS": ("pipeline_workers", int),
    "QFAAS_MAX_IN_FLIGHT": ("max_in_flight", int),
    "QFAAS_THRESHOLD_MS": ("default_threshold_ms", int),
    "QFAAS_TOKEN_TTL": ("token_ttl_seconds", int),
    "QFAAS_ADMIN_PASSWORD": ("admin_password", str),
}


def load_config(
    path: Path | str | None = None, env: Mapping[str, str] | None = None
) -> Config:
    env = os.environ if env is None else env
    config = Config()

    if path is None and env.get("QFAAS_CONFIG"):
        path = env["QFAAS_CONFIG"]
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            doc: dict[str, Any] = json.load(fh)
        known = {f.name: f for f in fields(Config)}
        for key, value in doc.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            if key in ("data_dir", "catalog_path", "ui_dir") and value is not None:
                value = Path(value)
            setattr(config, key, value)

    for var, (attr, cast) in _ENV_MAP.items():
        if env.get(var):
            setattr(config, attr, cast(env[var]))
    return config
