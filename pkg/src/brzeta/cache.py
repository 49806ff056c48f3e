"""Content-addressed JSON cache of computed results."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

ENV_VAR = "BRZETA_CACHE_DIR"


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "brzeta"


def resolve_cache_dir(configured: str | os.PathLike | None = None) -> Path:
    """The environment variable wins over the configured directory."""
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    if configured:
        return Path(configured)
    return default_cache_dir()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def cache_key(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


class Cache:
    """One JSON file per entry, named by the hash of its request.

    Writes go through a temporary file and an atomic rename, so readers
    never see partial entries.
    """

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, request):
        path = self._path(cache_key(request))
        try:
            entry = json.loads(path.read_text())
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        if entry.get("request") != json.loads(canonical_json(request)):
            return None
        return entry.get("result")

    def put(self, request, result) -> str:
        key = cache_key(request)
        self.directory.mkdir(parents=True, exist_ok=True)
        data = canonical_json({"request": request, "result": result})
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(data)
            os.replace(tmp, self._path(key))
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return key

    def entries(self) -> list[dict]:
        if not self.directory.is_dir():
            return []
        out = []
        for path in sorted(self.directory.glob("*.json")):
            try:
                entry = json.loads(path.read_text())
            except json.JSONDecodeError:
                continue
            out.append({"key": path.stem, "size": path.stat().st_size,
                        "request": entry.get("request")})
        return out

    def clear(self) -> int:
        n = 0
        if self.directory.is_dir():
            for path in self.directory.glob("*.json"):
                path.unlink()
                n += 1
        return n
