"""On-disk JSON cache for expensive results.

The directory comes from ``QHSBENCH_CACHE_DIR`` (default
``~/.cache/qhsbench``). Entries are keyed by a hash of the tool version and
the caller's key tuple and written with write-temp-then-rename, so readers
never see a partial file.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__

ENV_VAR = "QHSBENCH_CACHE_DIR"
_disabled = False


def cache_dir() -> Path:
    return Path(os.environ.get(ENV_VAR) or Path.home() / ".cache" / "qhsbench")


def disable(flag: bool = True) -> None:
    global _disabled
    _disabled = flag


def enabled() -> bool:
    return not _disabled


def _path(key: tuple[str, ...]) -> Path:
    raw = json.dumps([__version__, *key], separators=(",", ":"))
    digest = hashlib.sha256(raw.encode()).hexdigest()[:32]
    return cache_dir() / f"{key[0]}-{digest}.json"


def load(key: tuple[str, ...]):
    if _disabled:
        return None
    path = _path(key)
    try:
        with open(path, encoding="utf-8") as fh:
            entry = json.load(fh)
    except (OSError, ValueError):
        return None
    if entry.get("version") != __version__ or entry.get("key") != list(key):
        return None
    return entry["payload"]


def store(key: tuple[str, ...], payload) -> None:
    if _disabled:
        return
    path = _path(key)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {"version": __version__, "key": list(key), "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(entry, fh, sort_keys=True, separators=(",", ":"))
        os.replace(tmp, path)
    except OSError:
        # a read-only cache location only costs recomputation
        pass
