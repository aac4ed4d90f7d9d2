"""Embedded JSON-document persistence.

One directory per collection, one file per record.  Writes go to a temp file
in the same directory, are fsynced, then atomically renamed over the target,
so an acknowledged write survives a crash at any point.  Every record carries
a ``schema`` tag so the on-disk format can evolve.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from pathlib import Path
from typing import Any


class StorageFailure(Exception):
    pass


_KEY_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,127}$")


class JsonDirStore:
    """A flat key -> JSON-document store backed by one directory."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        if not _KEY_RE.match(key):
            raise StorageFailure(f"illegal store key {key!r}")
        return self.root / f"{key}.json"

    def write(self, key: str, doc: dict[str, Any]) -> None:
        path = self._path(key)
        try:
            fd, tmp = tempfile.mkstemp(prefix=f".{key}.", suffix=".tmp", dir=self.root)
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    json.dump(doc, fh, ensure_ascii=False, separators=(",", ":"))
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp, path)
            except BaseException:
                try:
                    os.unlink(tmp)
                except OSError:
                    pass
                raise
        except OSError as exc:
            raise StorageFailure(f"cannot persist {key!r}: {exc}") from exc

    def read(self, key: str) -> dict[str, Any] | None:
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        except FileNotFoundError:
            return None
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageFailure(f"cannot read {key!r}: {exc}") from exc

    def delete(self, key: str) -> bool:
        try:
            os.unlink(self._path(key))
            return True
        except FileNotFoundError:
            return False
        except OSError as exc:
            raise StorageFailure(f"cannot delete {key!r}: {exc}") from exc

    def keys(self) -> list[str]:
        out = []
        for entry in self.root.iterdir():
            if entry.suffix == ".json" and not entry.name.startswith("."):
                out.append(entry.name[: -len(".json")])
        return sorted(out)

    def load_all(self) -> dict[str, dict[str, Any]]:
        return {key: doc for key in self.keys() if (doc := self.read(key)) is not None}
