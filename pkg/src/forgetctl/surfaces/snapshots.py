"""Snapshot repository.

A snapshot is a directory holding verbatim copies of the segment and
tombstone files at creation time plus a manifest with SHA-256 checksums.
Snapshot directories are immutable; erasing data from one means building a
replacement snapshot and atomically swapping it in (the rewrite is driven by
the engine, which owns the scratch-restore machinery). The store only ever
exposes fully built snapshots: builds happen in a dot-prefixed staging
directory that is renamed into place, so readers never observe a half-written
snapshot, and the old snapshot is deleted only after the replacement exists.
"""

from __future__ import annotations

import hashlib
import json
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from ..errors import IoFailure, SnapshotNotFound

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class Snapshot:
    snapshot_id: str
    path: Path
    created_at: float
    files: dict[str, str]  # relative path -> sha256

    def data_files(self) -> list[Path]:
        return [self.path / rel for rel in sorted(self.files)]


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class SnapshotStore:
    def __init__(self, directory: Path) -> None:
        self.directory = directory
        self.directory.mkdir(parents=True, exist_ok=True)
        self._counter_path = self.directory / ".next-id"

    # ---- naming ----

    def _existing_numbers(self) -> list[int]:
        numbers = []
        for child in self.directory.iterdir():
            name = child.name
            if name.startswith("snap-") and child.is_dir():
                try:
                    numbers.append(int(name.split("-", 1)[1]))
                except ValueError:
                    continue
        return numbers

    def next_id(self) -> str:
        # Ids are never reused, even after a delete: a rewritten snapshot must
        # be distinguishable from the one it replaced. The high-water mark
        # lives in a counter file so deletes cannot roll it back.
        saved = 0
        if self._counter_path.exists():
            try:
                saved = int(self._counter_path.read_text())
            except ValueError:
                saved = 0
        numbers = self._existing_numbers()
        nxt = max([saved] + numbers) + 1
        self._counter_path.write_text(str(nxt))
        return f"snap-{nxt:06d}"

    # ---- creation ----

    def create_from_files(self, files: Iterable[Path], created_at: float,
                          snapshot_id: Optional[str] = None) -> Snapshot:
        """Copy the given files into a new snapshot directory.

        The build happens under a staging name and is renamed into place, so
        a crash can leave at most a staging directory, never a half snapshot
        under a real id.
        """
        snapshot_id = snapshot_id or self.next_id()
        final = self.directory / snapshot_id
        if final.exists():
            raise IoFailure(f"snapshot {snapshot_id} already exists")
        staging = self.directory / f".build-{snapshot_id}"
        if staging.exists():
            shutil.rmtree(staging)
        manifest: dict[str, str] = {}
        try:
            data_dir = staging / "segments"
            data_dir.mkdir(parents=True)
            for source in files:
                target = data_dir / source.name
                shutil.copyfile(source, target)
                manifest[f"segments/{source.name}"] = _sha256(target)
            (staging / MANIFEST_NAME).write_text(
                json.dumps({"snapshot_id": snapshot_id, "created_at": created_at,
                            "files": manifest}, indent=2),
                encoding="utf-8",
            )
            staging.rename(final)
        except OSError as exc:
            shutil.rmtree(staging, ignore_errors=True)
            raise IoFailure(f"building snapshot {snapshot_id}: {exc}") from exc
        return Snapshot(snapshot_id=snapshot_id, path=final, created_at=created_at,
                        files=manifest)

    # ---- lookup ----

    def get(self, snapshot_id: str) -> Snapshot:
        path = self.directory / snapshot_id
        manifest_path = path / MANIFEST_NAME
        if not manifest_path.exists():
            raise SnapshotNotFound(snapshot_id)
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
        return Snapshot(snapshot_id=raw["snapshot_id"], path=path,
                        created_at=raw["created_at"], files=dict(raw["files"]))

    def list_snapshots(self) -> list[Snapshot]:
        found = []
        for child in sorted(self.directory.iterdir()):
            if child.is_dir() and not child.name.startswith("."):
                try:
                    found.append(self.get(child.name))
                except SnapshotNotFound:
                    continue
        return found

    def verify(self, snapshot_id: str) -> bool:
        """Recompute checksums against the manifest."""
        snapshot = self.get(snapshot_id)
        for rel, expected in snapshot.files.items():
            path = snapshot.path / rel
            if not path.exists() or _sha256(path) != expected:
                return False
        return True

    def delete(self, snapshot_id: str) -> None:
        snapshot = self.get(snapshot_id)
        shutil.rmtree(snapshot.path)

    # ---- scanning support ----

    def all_files(self) -> list[Path]:
        """Every file under the store, manifests included (scanner input)."""
        return [p for p in sorted(self.directory.rglob("*")) if p.is_file()]
