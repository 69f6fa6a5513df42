"""Content-addressed JSON result cache.

Entries are keyed by the SHA-256 of a canonical-JSON description of the full
computation (geometry, discretization, source, code version).  Each file
stores the payload together with the payload's own hash, so `verify` can
detect corruption without recomputing physics; corrupted entries are
quarantined, not deleted.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

from .errors import CacheError

__all__ = ["content_key", "ResultCache"]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def content_key(desc: dict) -> str:
    return hashlib.sha256(canonical_json(desc).encode()).hexdigest()


class ResultCache:
    """Directory of {key}.json entries with integrity hashes."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str):
        path = self._path(key)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text())
            payload = entry["payload"]
            if content_key(payload) != entry["payload_hash"]:
                raise CacheError(f"hash mismatch in {path.name}")
            return payload
        except (KeyError, ValueError, CacheError):
            quarantined = path.with_suffix(".corrupt")
            path.rename(quarantined)
            import warnings
            warnings.warn(f"quarantined corrupted cache entry {path.name}")
            return None

    def put(self, key: str, payload: dict, meta: dict | None = None) -> None:
        entry = {
            "key": key,
            "created": time.time(),
            "meta": meta or {},
            "payload_hash": content_key(payload),
            "payload": payload,
        }
        tmp = self._path(key).with_suffix(".tmp")
        tmp.write_text(json.dumps(entry, indent=None, sort_keys=True))
        os.replace(tmp, self._path(key))

    def keys(self):
        return sorted(p.stem for p in self.root.glob("*.json"))

    def verify(self) -> dict:
        """Recompute payload hashes; quarantine mismatches."""
        ok, bad = [], []
        for key in self.keys():
            path = self._path(key)
            try:
                entry = json.loads(path.read_text())
                if content_key(entry["payload"]) == entry["payload_hash"]:
                    ok.append(key)
                    continue
            except (KeyError, ValueError):
                pass
            bad.append(key)
            path.rename(path.with_suffix(".corrupt"))
        return {"ok": ok, "quarantined": bad}

    def evict(self, older_than_s: float | None = None, key: str | None = None,
              dry_run: bool = False) -> list:
        """Drop entries by age or exact key; returns the affected keys."""
        victims = []
        now = time.time()
        for k in self.keys():
            if key is not None and k != key:
                continue
            if older_than_s is not None:
                try:
                    created = json.loads(self._path(k).read_text()).get("created", 0)
                except ValueError:
                    created = 0
                if now - created < older_than_s:
                    continue
            victims.append(k)
        if not dry_run:
            for k in victims:
                self._path(k).unlink()
        return victims
