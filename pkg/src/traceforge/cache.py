"""Content-addressed disk cache for computed artifacts.

Entries are keyed by a semantic key string; the file name is the SHA-256 of
the key.  Polynomials are stored in the canonical text form, structured
results as JSON.  Every entry has a sidecar holding the SHA-256 of the file
bytes; a mismatch (or a missing sidecar) is treated as a miss, so corrupted
entries are silently recomputed.  Writes are atomic via rename, concurrent
writers follow last-writer-wins.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .polyring import CommPoly, VarSet, poly_from_text, poly_to_text


def _digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_text(text: str) -> str:
    return _digest_bytes(text.encode())


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0
    corrupt: int = 0
    writes: int = 0


@dataclass
class CacheStore:
    root: Path
    stats: CacheStats = field(default_factory=CacheStats)

    def __post_init__(self) -> None:
        self.root = Path(self.root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, key: str, ext: str) -> Path:
        return self.root / (digest_text(key)[:40] + ext)

    # -- raw text entries ---------------------------------------------------

    def _read(self, path: Path) -> bytes | None:
        side = path.with_suffix(path.suffix + ".sha256")
        try:
            data = path.read_bytes()
            want = side.read_text().strip()
        except OSError:
            with self._lock:
                self.stats.misses += 1
            return None
        if _digest_bytes(data) != want:
            with self._lock:
                self.stats.corrupt += 1
                self.stats.misses += 1
            return None
        with self._lock:
            self.stats.hits += 1
        return data

    def _write(self, path: Path, data: bytes) -> None:
        side = path.with_suffix(path.suffix + ".sha256")
        for target, payload in ((path, data), (side, _digest_bytes(data).encode())):
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(payload)
                os.replace(tmp, target)
            except BaseException:
                try:
                    os.unlink(tmp)
                except OSError:
                    pass
                raise
        with self._lock:
            self.stats.writes += 1

    # -- typed entries ------------------------------------------------------

    def get_poly(self, key: str, varset: VarSet) -> CommPoly | None:
        data = self._read(self._path(key, ".poly"))
        if data is None:
            return None
        try:
            return poly_from_text(varset, data.decode())
        except ValueError:
            with self._lock:
                self.stats.corrupt += 1
            return None

    def put_poly(self, key: str, poly: CommPoly) -> None:
        self._write(self._path(key, ".poly"), poly_to_text(poly).encode())

    def get_json(self, key: str):
        data = self._read(self._path(key, ".json"))
        if data is None:
            return None
        try:
            return json.loads(data.decode())
        except ValueError:
            with self._lock:
                self.stats.corrupt += 1
            return None

    def put_json(self, key: str, obj) -> None:
        text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
        self._write(self._path(key, ".json"), text.encode())
