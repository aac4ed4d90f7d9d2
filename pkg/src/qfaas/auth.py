"""Users, password hashing, and opaque bearer tokens.

Users persist under ``data/users/``; passwords are stored as salted PBKDF2
hashes, never in the clear.  Tokens are random server-side strings with a
TTL, handed out by the login endpoint and checked on every other route.
"""

from __future__ import annotations

import hashlib
import hmac
import os
import re
import secrets
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import Conflict
from .storage import JsonDirStore

ROLES = ("admin", "developer", "enduser")

_USERNAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$")
_USER_SCHEMA = "qfaas.user.v1"


@dataclass(frozen=True)
class User:
    username: str
    role: str

    @property
    def is_admin(self) -> bool:
        return self.role == "admin"


def _hash_password(password: str, salt: bytes, iterations: int) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)


class UserStore:
    def __init__(self, data_dir: Path | str, iterations: int = 60_000):
        self._store = JsonDirStore(Path(data_dir) / "users")
        self._iterations = iterations
        self._cache = self._store.load_all()

    def get(self, username: str) -> User | None:
        doc = self._cache.get(username)
        if doc is None:
            return None
        return User(doc["username"], doc["role"])

    def create_user(self, username: str, password: str, role: str) -> User:
        if not _USERNAME_RE.match(username):
            raise ValueError(f"illegal username {username!r}")
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        if username in self._cache:
            raise Conflict(f"user '{username}' already exists")
        salt = os.urandom(16)
        doc = {
            "schema": _USER_SCHEMA,
            "username": username,
            "role": role,
            "salt": salt.hex(),
            "password_hash": _hash_password(password, salt, self._iterations).hex(),
            "iterations": self._iterations,
            "created_at": time.time(),
        }
        self._store.write(username, doc)
        self._cache[username] = doc
        return User(username, role)

    def verify(self, username: str, password: str) -> User | None:
        """Constant-shape credential check: unknown users cost a hash too."""
        doc = self._cache.get(username)
        if doc is None:
            _hash_password(password, b"\x00" * 16, self._iterations)
            return None
        computed = _hash_password(
            password, bytes.fromhex(doc["salt"]), int(doc["iterations"])
        )
        if not hmac.compare_digest(computed.hex(), doc["password_hash"]):
            return None
        return User(doc["username"], doc["role"])

    def ensure_seed_users(
        self,
        admin_password: str | None = None,
        extra_users: Iterable[dict] = (),
    ) -> str | None:
        """Create the admin account (and any configured users) at first boot.

        Returns the generated admin password when one had to be invented, so
        the caller can print it once to the operator log.
        """
        generated = None
        if self.get("admin") is None:
            password = admin_password
            if password is None:
                password = generated = secrets.token_urlsafe(12)
            self.create_user("admin", password, "admin")
        for entry in extra_users:
            if self.get(entry["username"]) is None:
                self.create_user(entry["username"], entry["password"], entry["role"])
        return generated


class TokenStore:
    """In-memory bearer tokens; a restart invalidates every session."""

    def __init__(self, ttl_seconds: int = 3600):
        self.ttl_seconds = ttl_seconds
        self._tokens: dict[str, tuple[str, float]] = {}

    def issue(self, username: str) -> tuple[str, int]:
        token = secrets.token_urlsafe(32)
        self._tokens[token] = (username, time.time() + self.ttl_seconds)
        return token, self.ttl_seconds

    def resolve(self, token: str) -> str | None:
        entry = self._tokens.get(token)
        if entry is None:
            return None
        username, expires_at = entry
        if time.time() >= expires_at:
            self._tokens.pop(token, None)
            return None
        return username

    def expire_now(self, token: str) -> None:
        """Test hook: force a token past its TTL."""
        if token in self._tokens:
            username, _ = self._tokens[token]
            self._tokens[token] = (username, 0.0)
