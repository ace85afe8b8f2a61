"""On-disk cache of JSON results keyed by input digest and tool version."""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from filelock import FileLock

from . import __version__

ENV_VAR = "HURWITZKIT_CACHE"


def digest(*parts) -> str:
    blob = json.dumps([__version__, *parts], sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


class ResultCache:
    """Directory of ``<key>.json`` files guarded by one lock file.

    Entries record the tool version; a mismatch is treated as a miss.
    """

    def __init__(self, root: str | Path | None):
        root = root or os.environ.get(ENV_VAR)
        self.root = Path(root) if root else None
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)
            self.lock = FileLock(str(self.root / ".lock"))

    @property
    def enabled(self) -> bool:
        return self.root is not None

    def get(self, key: str) -> dict | None:
        if self.root is None:
            return None
        path = self.root / f"{key}.json"
        with self.lock:
            if not path.exists():
                return None
            entry = json.loads(path.read_text())
        if entry.get("toolVersion") != __version__ or entry.get("key") != key:
            return None
        return entry["payload"]

    def put(self, key: str, payload: dict) -> None:
        if self.root is None:
            return
        path = self.root / f"{key}.json"
        tmp = path.with_suffix(".tmp")
        with self.lock:
            tmp.write_text(json.dumps({"key": key, "toolVersion": __version__, "payload": payload}, sort_keys=True))
            tmp.replace(path)
