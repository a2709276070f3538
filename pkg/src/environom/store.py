"""Directory-backed run store.

One directory per run.  A run is written under an exclusive lock file, gets a
manifest before any artifact, and is sealed by an empty ``.complete`` marker;
completed runs are immutable and re-running with identical inputs reuses
them.  Manifests carry content hashes and configuration only (no timestamps),
so a re-created run is byte-identical to the original.
"""

from __future__ import annotations

import json
import os
import shutil
from contextlib import contextmanager
from pathlib import Path

_LOCK = ".lock"
_COMPLETE = ".complete"
MANIFEST = "manifest.json"


class StoreError(Exception):
    pass


class RunStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def run_dir(self, run_id: str) -> Path:
        return self.root / run_id

    def is_complete(self, run_id: str) -> bool:
        return (self.run_dir(run_id) / _COMPLETE).exists()

    def manifest(self, run_id: str) -> dict:
        path = self.run_dir(run_id) / MANIFEST
        if not path.exists():
            raise StoreError(f"unknown run id {run_id!r}")
        with open(path) as fh:
            return json.load(fh)

    def list_runs(self, prefix: str = "") -> list[str]:
        return sorted(p.name for p in self.root.iterdir()
                      if p.is_dir() and p.name.startswith(prefix)
                      and (p / _COMPLETE).exists())

    @contextmanager
    def begin(self, run_id: str, manifest: dict):
        """Exclusive writer context; seals the run on clean exit.

        Raises if the run is already complete (callers should reuse instead)
        or if another writer holds the lock.  A partially written run from a
        crashed writer is wiped and redone.
        """
        d = self.run_dir(run_id)
        if self.is_complete(run_id):
            raise StoreError(f"run {run_id!r} is already complete")
        d.mkdir(parents=True, exist_ok=True)
        lock = d / _LOCK
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StoreError(
                f"run {run_id!r} is being written by another process "
                f"(stale lock? remove {lock})") from None
        os.close(fd)
        try:
            for leftover in d.iterdir():
                if leftover.name == _LOCK:
                    continue
                if leftover.is_dir():
                    shutil.rmtree(leftover)
                else:
                    leftover.unlink()
            with open(d / MANIFEST, "w") as fh:
                json.dump(manifest, fh, indent=1, sort_keys=True)
                fh.write("\n")
            yield d
            (d / _COMPLETE).touch()
        finally:
            lock.unlink(missing_ok=True)
