"""The search engine.

Single-writer, multi-reader document store over JSON segment files with a
write-ahead translog, request/query caches, an operational event log, a
snapshot repository, and optional synchronous replication to a second engine
instance writing to its own directory.

Deletion model: mark_delete only tombstones (sidecar files; segments stay
immutable), so deleted content remains on several surfaces until maintenance
operations run. merge_segments(expunge_deletes=True) is the step that
actually removes tombstoned content from live and persisted segments. The
cleansing pipeline in the cleanse package sequences that with cache clears,
translog flush, snapshot rewrites, and log culls.

Concurrency: every mutation takes the exclusive side of a readers-writer
lock; searches take the shared side. Long maintenance operations (merge,
flush, snapshot work) hold the exclusive side for their whole duration - that
barrier is deliberate and is what the benchmark harness measures.
"""

from __future__ import annotations

import logging
import shutil
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from ..clock import Clock, SystemClock
from ..errors import (
    DuplicateId,
    IoFailure,
    MergeInProgress,
    ReplicaUnreachable,
    RewriteIncomplete,
)
from ..selectors import Selector
from ..surfaces.caches import ClearReport, SearchCaches
from ..surfaces.eventlog import EventLog
from ..surfaces.snapshots import Snapshot, SnapshotStore
from ..surfaces.translog import Translog
from .documents import Document, PiiTag
from .queries import Query, QueryKind
from .segments import SEGMENT_SUFFIX, Segment, StoredDoc

logger = logging.getLogger(__name__)


class RWLock:
    """Readers-writer lock with a reentrant writer and writer preference.

    New readers queue behind a waiting writer so maintenance operations are
    not starved under constant query load; the stall they cause is part of
    what the benchmark measures.
    """

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._readers = 0
        self._writer_ident: Optional[int] = None
        self._writer_depth = 0
        self._writers_waiting = 0

    def acquire_read(self) -> None:
        me = threading.get_ident()
        with self._cond:
            if self._writer_ident == me:
                return  # the writer may read its own intermediate state
            while self._writer_ident is not None or self._writers_waiting:
                self._cond.wait()
            self._readers += 1

    def release_read(self) -> None:
        with self._cond:
            if self._writer_ident == threading.get_ident():
                return
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self, blocking: bool = True) -> bool:
        me = threading.get_ident()
        with self._cond:
            if self._writer_ident == me:
                self._writer_depth += 1
                return True
            self._writers_waiting += 1
            try:
                while self._readers or self._writer_ident is not None:
                    if not blocking:
                        return False
                    self._cond.wait()
                self._writer_ident = me
                self._writer_depth = 1
                return True
            finally:
                self._writers_waiting -= 1

    def release_write(self) -> None:
        with self._cond:
            self._writer_depth -= 1
            if self._writer_depth == 0:
                self._writer_ident = None
                self._cond.notify_all()

    class _ReadGuard:
        def __init__(self, lock: "RWLock") -> None:
            self._lock = lock

        def __enter__(self) -> None:
            self._lock.acquire_read()

        def __exit__(self, *exc: object) -> None:
            self._lock.release_read()

    class _WriteGuard:
        def __init__(self, lock: "RWLock") -> None:
            self._lock = lock

        def __enter__(self) -> None:
            self._lock.acquire_write()

        def __exit__(self, *exc: object) -> None:
            self._lock.release_write()

    def read(self) -> "_ReadGuard":
        return RWLock._ReadGuard(self)

    def write(self) -> "_WriteGuard":
        return RWLock._WriteGuard(self)


@dataclass
class EngineConfig:
    seal_doc_count: int = 1000
    flush_threshold_size: int = Translog.DEFAULT_FLUSH_THRESHOLD
    request_cache_capacity: int = 512
    query_cache_capacity: int = 4096
    log_level: str = "info"                 # "info" or "trace"
    log_retention_seconds: float = 30 * 86_400.0
    replication_mode: str = "strict"        # "strict" or "queued"
    auto_flush: bool = True
    top_sources: int = 10                   # stored fields kept per cached response


@dataclass(frozen=True)
class MergeReport:
    segments_before: int
    segments_after: int
    docs_expunged: int
    bytes_reclaimed: int
    duration_seconds: float
    expunge: bool


@dataclass(frozen=True)
class FlushReport:
    sealed_segment_id: Optional[str]
    entries_cleared: int
    bytes_cleared: int


@dataclass(frozen=True)
class SweepReport:
    expired_doc_ids: tuple[str, ...]
    enqueued: bool


@dataclass
class Response:
    """Full search response; this is what the request cache stores."""

    hits: list[tuple[str, float]]
    sources: dict[str, dict[str, str]]
    aggregations: Optional[dict[str, int]] = None

    def to_payload(self) -> dict:
        return {"hits": [[d, s] for d, s in self.hits], "sources": self.sources,
                "aggregations": self.aggregations}


class SearchEngine:
    def __init__(
        self,
        data_dir: Path,
        clock: Optional[Clock] = None,
        config: Optional[EngineConfig] = None,
        replica: Optional["SearchEngine"] = None,
        name: str = "primary",
    ) -> None:
        self.data_dir = Path(data_dir)
        self.clock = clock or SystemClock()
        self.config = config or EngineConfig()
        self.replica = replica
        self.name = name
        self.reachable = True  # flipped by tests to simulate a dead replica

        self.segments_dir = self.data_dir / "segments"
        self.segments_dir.mkdir(parents=True, exist_ok=True)
        self.translog = Translog(self.data_dir / "translog.bin",
                                 flush_threshold_size=self.config.flush_threshold_size)
        self.caches = SearchCaches(self.config.request_cache_capacity,
                                   self.config.query_cache_capacity)
        self.event_log = EventLog(self.data_dir / "logs", level=self.config.log_level,
                                  retention_seconds=self.config.log_retention_seconds)
        self.snapshots = SnapshotStore(self.data_dir / "snapshots")

        self._lock = RWLock()
        self._segments: list[Segment] = []
        # The active segment gets a real id only when sealed, so merge and
        # rewrite can allocate ids from the same counter without collisions.
        self._active = Segment("active")
        self._segment_counter = 1
        self._doc_segment: dict[str, Segment] = {}
        self._tombstoned: set[str] = set()
        self._tag_index: dict[str, set[str]] = {}
        self._version = 0

        self.cleansing_queue: list[Selector] = []
        self.index_listeners: list[Callable[[StoredDoc], None]] = []
        self._pending_replica_ops: list[tuple[str, tuple]] = []
        self.fail_next_rewrite = False  # one-shot fault injection for tests

        self._recover()

    # ------------------------------------------------------------------
    # bootstrap / recovery
    # ------------------------------------------------------------------

    def _segment_name(self, number: int) -> str:
        return f"seg-{number:06d}"

    def _recover(self) -> None:
        for path in sorted(self.segments_dir.glob(f"*{SEGMENT_SUFFIX}")):
            segment = Segment.load(path)
            self._register_segment(segment)
            number = int(segment.segment_id.split("-")[1])
            self._segment_counter = max(self._segment_counter, number + 1)
        self._active = Segment("active")
        # Replay anything the last flush did not commit. Replay is idempotent:
        # a doc already present in a sealed segment is skipped, tombstones are
        # set adds.
        for entry in self.translog.replay():
            if entry.op == "index":
                payload = entry.payload
                if payload["doc_id"] in self._doc_segment:
                    continue
                stored = StoredDoc.from_payload(payload["doc_id"], payload)
                self._install_doc(stored)
            elif entry.op == "mark_delete":
                self._apply_tombstones(set(entry.payload["doc_ids"]), persist=True)
        self._version += 1

    def _register_segment(self, segment: Segment) -> None:
        self._segments.append(segment)
        for doc_id, doc in segment.docs.items():
            self._doc_segment[doc_id] = segment
            for subject in doc.to_document().subject_ids():
                self._tag_index.setdefault(subject, set()).add(doc_id)
        self._tombstoned |= segment.tombstones & segment.docs.keys()

    # ------------------------------------------------------------------
    # introspection used by the cleansing and lifecycle layers
    # ------------------------------------------------------------------

    def read_lock(self) -> "RWLock._ReadGuard":
        return self._lock.read()

    def surface_paths(self) -> dict[str, list[Path]]:
        """Files per surface, as the residue scanner sees them."""
        segment_files = sorted(self.segments_dir.glob(f"*{SEGMENT_SUFFIX}"))
        tombstone_files = sorted(self.segments_dir.glob("*.tomb"))
        return {
            "segments": segment_files,
            "tombstones": tombstone_files,
            "translog": [self.translog.path] if self.translog.path.exists() else [],
            "snapshots": self.snapshots.all_files(),
            "logs": self.event_log.files(),
        }

    def doc_count(self) -> int:
        return len(self._doc_segment)

    def segments(self) -> list[Segment]:
        """All segments, sealed first, the active one last."""
        return list(self._segments) + [self._active]

    def live_doc_ids(self) -> set[str]:
        now = self.clock.now()
        return {
            doc_id
            for doc_id, segment in self._doc_segment.items()
            if doc_id not in self._tombstoned and not self._expired(segment.docs[doc_id], now)
        }

    def get_doc(self, doc_id: str) -> Optional[StoredDoc]:
        segment = self._doc_segment.get(doc_id)
        return segment.docs.get(doc_id) if segment else None

    def subject_docs(self, subject_id: str) -> set[str]:
        return set(self._tag_index.get(subject_id, set()))

    def tombstoned_ids(self) -> frozenset[str]:
        return frozenset(self._tombstoned)

    def state_fingerprint(self) -> tuple:
        """Logical state: live docs, tombstones, pending translog ops.

        Replication guarantees this fingerprint matches between primary and
        replica after every acknowledged mutation; physical segment layout may
        differ after restores and is deliberately excluded.
        """
        docs = []
        with self._lock.read():
            for doc_id, segment in sorted(self._doc_segment.items()):
                stored = segment.docs[doc_id]
                docs.append((doc_id, tuple(sorted(stored.fields.items())),
                             tuple(sorted((n, t.subject_id, t.purpose, t.ttl_seconds)
                                          for n, t in stored.pii_tags.items())),
                             stored.indexed_at))
            pending = [
                (e.op, tuple(sorted(e.payload.items(), key=lambda kv: str(kv))))
                for e in self.translog.replay()
            ]
            return (tuple(docs), tuple(sorted(self._tombstoned)), tuple(pending))

    # ------------------------------------------------------------------
    # replication plumbing
    # ------------------------------------------------------------------

    def _replica_call(self, op: str, *args: object) -> None:
        if self.replica is None:
            return
        if not self.replica.reachable:
            if self.config.replication_mode == "strict":
                raise ReplicaUnreachable(
                    f"replica refused {op}; strict replication fails the primary mutation")
            self._pending_replica_ops.append((op, args))
            return
        if self._pending_replica_ops:
            self.drain_replica_queue()
        getattr(self.replica, f"apply_{op}")(*args)

    def _check_replica_before_mutation(self, op: str) -> None:
        # Strict mode refuses the mutation before any local change so the two
        # sides never diverge.
        if (self.replica is not None and self.config.replication_mode == "strict"
                and not self.replica.reachable):
            raise ReplicaUnreachable(
                f"replica unreachable; strict replication refuses {op}")

    def drain_replica_queue(self) -> int:
        """Apply queued ops to a replica that became reachable again."""
        if self.replica is None or not self.replica.reachable:
            return 0
        drained = 0
        while self._pending_replica_ops:
            op, args = self._pending_replica_ops.pop(0)
            getattr(self.replica, f"apply_{op}")(*args)
            drained += 1
        return drained

    # Replica-side entry points (called by the primary while it holds its own
    # write lock; the replica takes its own).

    def apply_index(self, payload: dict) -> None:
        with self._lock.write():
            entry = self.translog.append("index", payload, payload["indexed_at"])
            stored = StoredDoc.from_payload(payload["doc_id"], payload)
            stored.seq = entry.seq_no
            self._install_doc(stored)
            self._log_index(stored)
            self._version += 1

    def apply_mark_delete(self, doc_ids: list[str], origin: str, timestamp: float) -> None:
        with self._lock.write():
            self.translog.append("mark_delete", {"doc_ids": list(doc_ids), "origin": origin},
                                 timestamp)
            self._apply_tombstones(set(doc_ids), persist=True)
            self.event_log.log("mark_delete", {"doc_ids": list(doc_ids), "origin": origin},
                               timestamp)
            self._version += 1

    def apply_flush(self) -> None:
        self.flush(_propagate=False)

    def apply_merge(self, expunge_deletes: bool) -> None:
        self.merge_segments(expunge_deletes=expunge_deletes, _propagate=False)

    # ------------------------------------------------------------------
    # writes
    # ------------------------------------------------------------------

    def index_document(self, doc: Document) -> str:
        """Index one document; returns its id. WAL-first, replica-synchronous."""
        with self._lock.write():
            if doc.doc_id in self._doc_segment:
                raise DuplicateId(doc.doc_id)
            self._check_replica_before_mutation("index")
            now = self.clock.now()
            payload = {"doc_id": doc.doc_id, "fields": dict(doc.fields),
                       "pii_tags": {n: {"subject_id": t.subject_id, "purpose": t.purpose,
                                        "ttl_seconds": t.ttl_seconds}
                                    for n, t in doc.pii_tags.items()},
                       "indexed_at": now}
            entry = self.translog.append("index", payload, now)
            stored = StoredDoc(doc_id=doc.doc_id, fields=dict(doc.fields),
                               pii_tags=dict(doc.pii_tags), indexed_at=now,
                               seq=entry.seq_no)
            self._install_doc(stored)
            self._log_index(stored)
            for listener in self.index_listeners:
                listener(stored)
            self._replica_call("index", payload)
            self._version += 1
            self._maybe_auto_flush()
            return doc.doc_id

    def _install_doc(self, stored: StoredDoc) -> None:
        self._active.add(stored)
        self._doc_segment[stored.doc_id] = self._active
        for subject in stored.to_document().subject_ids():
            self._tag_index.setdefault(subject, set()).add(stored.doc_id)
        if len(self._active) >= self.config.seal_doc_count:
            self._seal_active()

    def _log_index(self, stored: StoredDoc) -> None:
        self.event_log.log(
            "index",
            {"doc_id": stored.doc_id, "field_names": sorted(stored.fields)},
            stored.indexed_at,
            raw_values={"fields": dict(stored.fields)},
        )

    def _seal_active(self) -> None:
        if not len(self._active):
            return
        self._active.segment_id = self._segment_name(self._segment_counter)
        self._segment_counter += 1
        self._active.seal()
        self._active.persist(self.segments_dir)
        self._active.persist_tombstones()
        self._segments.append(self._active)
        self._active = Segment("active")

    def _maybe_auto_flush(self) -> None:
        if self.config.auto_flush and self.translog.size_bytes > self.translog.flush_threshold_size:
            self.flush()

    def mark_delete(self, selector: Selector) -> frozenset[str]:
        """Tombstone the selector's documents. Content stays until expunge."""
        with self._lock.write():
            doc_ids = self._resolve(selector)
            if not doc_ids:
                return frozenset()
            self._check_replica_before_mutation("mark_delete")
            now = self.clock.now()
            self.translog.append("mark_delete", {"doc_ids": sorted(doc_ids), "origin": "api"},
                                 now)
            self._apply_tombstones(doc_ids, persist=True)
            self.event_log.log("mark_delete",
                               {"doc_ids": sorted(doc_ids), "origin": "api"}, now)
            self._replica_call("mark_delete", sorted(doc_ids), "api", now)
            self._version += 1
            self._maybe_auto_flush()
            return frozenset(doc_ids)

    def _resolve(self, selector: Selector) -> set[str]:
        if selector.doc_ids:
            return {d for d in selector.doc_ids if d in self._doc_segment}
        if selector.subject_id is not None:
            return set(self._tag_index.get(selector.subject_id, set()))
        response = self._execute(selector.query)  # type: ignore[arg-type]
        return {doc_id for doc_id, _ in response.hits}

    def _apply_tombstones(self, doc_ids: set[str], persist: bool) -> None:
        for doc_id in doc_ids:
            segment = self._doc_segment.get(doc_id)
            if segment is None:
                continue
            segment.tombstones.add(doc_id)
            self._tombstoned.add(doc_id)
            if persist and segment.sealed:
                segment.persist_tombstones()

    def ttl_sweep(self, now: Optional[float] = None) -> SweepReport:
        """Tombstone every doc whose TTL elapsed and queue it for cleansing.

        Idempotent for a fixed now: already-tombstoned docs are not collected
        again, so a second sweep at the same instant is a no-op.
        """
        with self._lock.write():
            at = self.clock.now() if now is None else now
            expired = sorted(
                doc_id
                for doc_id, segment in self._doc_segment.items()
                if doc_id not in self._tombstoned
                and self._expired(segment.docs[doc_id], at)
            )
            if not expired:
                return SweepReport(expired_doc_ids=(), enqueued=False)
            self._check_replica_before_mutation("ttl_sweep")
            self.translog.append("mark_delete",
                                 {"doc_ids": expired, "origin": "ttl_sweep"}, at)
            self._apply_tombstones(set(expired), persist=True)
            self.event_log.log("ttl_sweep", {"doc_ids": expired}, at)
            self._replica_call("mark_delete", expired, "ttl_sweep", at)
            self.cleansing_queue.append(Selector.for_docs(*expired))
            self._version += 1
            self._maybe_auto_flush()
            return SweepReport(expired_doc_ids=tuple(expired), enqueued=True)

    @staticmethod
    def _expired(stored: StoredDoc, now: float) -> bool:
        expiry = stored.expires_at()
        return expiry is not None and expiry <= now

    # ------------------------------------------------------------------
    # maintenance (exclusive barrier)
    # ------------------------------------------------------------------

    def flush(self, _propagate: bool = True, wait: bool = True) -> FlushReport:
        """Seal the active segment, persist it, truncate the translog."""
        if not self._lock.acquire_write(blocking=wait):
            raise MergeInProgress("flush")
        try:
            sealed_id = None
            if len(self._active):
                sealed_id = self._active.segment_id
                self._seal_active()
            bytes_cleared = self.translog.size_bytes
            entries_cleared = self.translog.entry_count
            self.translog.truncate()
            self.event_log.log("flush", {"sealed_segment": sealed_id,
                                         "entries_cleared": entries_cleared},
                               self.clock.now())
            if _propagate:
                self._replica_call("flush")
            self._version += 1
            return FlushReport(sealed_segment_id=sealed_id, entries_cleared=entries_cleared,
                               bytes_cleared=bytes_cleared)
        finally:
            self._lock.release_write()

    def merge_segments(self, expunge_deletes: bool = False, _propagate: bool = True,
                       wait: bool = True) -> MergeReport:
        """Merge or expunge.

        expunge_deletes=True rewrites exactly the segments that carry
        tombstones (and purges tombstoned docs from the in-memory active
        segment); untouched segments are left alone, so the cost scales with
        the amount of deleted data rather than the corpus. Plain merge
        concatenates all sealed segments into one, dropping tombstoned docs
        along the way.
        """
        if not self._lock.acquire_write(blocking=wait):
            raise MergeInProgress("merge")
        try:
            started = time.perf_counter()
            before = len(self._segments)
            docs_expunged = 0
            bytes_reclaimed = 0

            # The active segment never has files, but its tombstoned docs must
            # not survive into a future seal.
            active_dead = self._active.tombstones & self._active.docs.keys()
            if active_dead:
                docs_expunged += len(active_dead)
                self._drop_index_entries(active_dead)
                self._active.remove_docs(set(active_dead))

            if expunge_deletes:
                rewritten: list[Segment] = []
                kept: list[Segment] = []
                for segment in self._segments:
                    dead = segment.tombstones & segment.docs.keys()
                    if not dead:
                        kept.append(segment)
                        continue
                    docs_expunged += len(dead)
                    self._drop_index_entries(dead)
                    old_bytes = _file_sizes(segment)
                    segment.remove_docs(set(dead))
                    segment.delete_files()
                    if len(segment):
                        replacement = self._rehome_segment(segment)
                        rewritten.append(replacement)
                        bytes_reclaimed += max(0, old_bytes - _file_sizes(replacement))
                    else:
                        bytes_reclaimed += old_bytes
                self._segments = kept + rewritten
            elif self._segments:
                merged = Segment(self._segment_name(self._segment_counter))
                self._segment_counter += 1
                old_bytes = 0
                for segment in self._segments:
                    dead = segment.tombstones & segment.docs.keys()
                    docs_expunged += len(dead)
                    self._drop_index_entries(dead)
                    old_bytes += _file_sizes(segment)
                    for doc_id, stored in segment.docs.items():
                        if doc_id not in dead:
                            merged.add(stored)
                for segment in self._segments:
                    segment.delete_files()
                if len(merged):
                    merged.seal()
                    merged.persist(self.segments_dir)
                    for doc_id in merged.docs:
                        self._doc_segment[doc_id] = merged
                    self._segments = [merged]
                    bytes_reclaimed = max(0, old_bytes - _file_sizes(merged))
                else:
                    self._segments = []
                    bytes_reclaimed = old_bytes

            duration = time.perf_counter() - started
            self.event_log.log("merge",
                               {"expunge": expunge_deletes, "docs_expunged": docs_expunged,
                                "segments_before": before,
                                "segments_after": len(self._segments)},
                               self.clock.now())
            if _propagate:
                self._replica_call("merge", expunge_deletes)
            self._version += 1
            return MergeReport(segments_before=before, segments_after=len(self._segments),
                               docs_expunged=docs_expunged, bytes_reclaimed=bytes_reclaimed,
                               duration_seconds=duration, expunge=expunge_deletes)
        finally:
            self._lock.release_write()

    def _rehome_segment(self, segment: Segment) -> Segment:
        """Re-persist a rewritten segment under a fresh id (old files are gone)."""
        replacement = Segment(self._segment_name(self._segment_counter))
        self._segment_counter += 1
        for stored in segment.docs.values():
            replacement.add(stored)
        replacement.seal()
        replacement.persist(self.segments_dir)
        for doc_id in replacement.docs:
            self._doc_segment[doc_id] = replacement
        return replacement

    def _drop_index_entries(self, doc_ids: set[str]) -> None:
        for doc_id in doc_ids:
            segment = self._doc_segment.pop(doc_id, None)
            if segment is None:
                continue
            stored = segment.docs.get(doc_id)
            if stored is not None:
                for subject in stored.to_document().subject_ids():
                    members = self._tag_index.get(subject)
                    if members is not None:
                        members.discard(doc_id)
                        if not members:
                            del self._tag_index[subject]
            self._tombstoned.discard(doc_id)

    def clear_caches(self, kind: str = "all") -> list[ClearReport]:
        with self._lock.write():
            reports = self.caches.clear(kind)
            self.event_log.log("cache_clear",
                               {"kind": kind,
                                "entries_removed": sum(r.entries_removed for r in reports)},
                               self.clock.now())
            return reports

    # ------------------------------------------------------------------
    # snapshots
    # ------------------------------------------------------------------

    def snapshot_create(self) -> Snapshot:
        """Flush, then copy every segment and tombstone file into a snapshot."""
        with self._lock.write():
            self.flush()
            files = [s.path for s in self._segments if s.path is not None]
            files += [t for s in self._segments
                      if (t := s.tombstone_path()) is not None and t.exists()]
            snapshot = self.snapshots.create_from_files(files, self.clock.now())
            self.event_log.log("snapshot_create",
                               {"snapshot_id": snapshot.snapshot_id,
                                "file_count": len(snapshot.files)},
                               self.clock.now())
            return snapshot

    def snapshot_restore(self, snapshot_id: str) -> None:
        """Replace current state with the snapshot's contents."""
        with self._lock.write():
            self._check_replica_before_mutation("snapshot_restore")
            snapshot = self.snapshots.get(snapshot_id)
            if not self.snapshots.verify(snapshot_id):
                raise IoFailure(f"snapshot {snapshot_id} failed checksum verification")
            for segment in self._segments:
                segment.delete_files()
            self._segments = []
            self._doc_segment = {}
            self._tag_index = {}
            self._tombstoned = set()
            for source in snapshot.data_files():
                if source.name.endswith(SEGMENT_SUFFIX) or source.name.endswith(".tomb"):
                    shutil.copyfile(source, self.segments_dir / source.name)
            for path in sorted(self.segments_dir.glob(f"*{SEGMENT_SUFFIX}")):
                segment = Segment.load(path)
                self._register_segment(segment)
                number = int(segment.segment_id.split("-")[1])
                self._segment_counter = max(self._segment_counter, number + 1)
            self._active = Segment("active")
            self.translog.truncate()
            self._version += 1
            self.event_log.log("snapshot_restore", {"snapshot_id": snapshot_id},
                               self.clock.now())
            if self.replica is not None:
                self._replica_resync()

    def _replica_resync(self) -> None:
        """Push the full logical state to the replica after a restore."""
        replica = self.replica
        assert replica is not None
        with replica._lock.write():
            for segment in replica._segments:
                segment.delete_files()
            replica._segments = []
            replica._doc_segment = {}
            replica._tag_index = {}
            replica._tombstoned = set()
            replica._active = Segment("active")
            replica.translog.truncate()
            for doc_id, segment in sorted(self._doc_segment.items()):
                replica._install_doc(segment.docs[doc_id])
            replica._apply_tombstones(set(self._tombstoned), persist=True)
            replica.flush(_propagate=False)
            replica._version += 1

    def snapshot_rewrite(self, snapshot_id: str, selector: Selector) -> Snapshot:
        """Build a replacement snapshot without the selector's documents.

        Restore into a scratch engine, erase there (tombstone, flush, expunge),
        snapshot the result under a new id, then delete the old snapshot. Any
        failure before the new snapshot exists leaves the old one intact and
        raises RewriteIncomplete.
        """
        with self._lock.write():
            old = self.snapshots.get(snapshot_id)
            scratch_dir = self.data_dir / ".scratch" / snapshot_id
            try:
                if scratch_dir.exists():
                    shutil.rmtree(scratch_dir)
                scratch = SearchEngine(scratch_dir, clock=self.clock,
                                       config=EngineConfig(log_level="info"),
                                       name="scratch")
                for source in old.data_files():
                    shutil.copyfile(source, scratch.segments_dir / source.name)
                scratch._recover_from_copied_files()
                scratch.mark_delete(selector)
                scratch.flush()
                scratch.merge_segments(expunge_deletes=True)
                if self.fail_next_rewrite:
                    self.fail_next_rewrite = False
                    raise IoFailure("injected rewrite failure")
                files = [s.path for s in scratch._segments if s.path is not None]
                files += [t for s in scratch._segments
                          if (t := s.tombstone_path()) is not None and t.exists()]
                replacement = self.snapshots.create_from_files(files, self.clock.now())
            except Exception as exc:
                shutil.rmtree(scratch_dir, ignore_errors=True)
                raise RewriteIncomplete(
                    f"rewrite of {snapshot_id} failed before swap: {exc}") from exc
            shutil.rmtree(scratch_dir, ignore_errors=True)
            self.snapshots.delete(snapshot_id)
            self.event_log.log("snapshot_rewrite",
                               {"old_snapshot": snapshot_id,
                                "new_snapshot": replacement.snapshot_id,
                                "selector": selector.describe()},
                               self.clock.now())
            return replacement

    def _recover_from_copied_files(self) -> None:
        with self._lock.write():
            self._segments = []
            self._doc_segment = {}
            self._tag_index = {}
            self._tombstoned = set()
            for path in sorted(self.segments_dir.glob(f"*{SEGMENT_SUFFIX}")):
                segment = Segment.load(path)
                self._register_segment(segment)
                number = int(segment.segment_id.split("-")[1])
                self._segment_counter = max(self._segment_counter, number + 1)
            self._active = Segment("active")
            self._version += 1

    # ------------------------------------------------------------------
    # reads
    # ------------------------------------------------------------------

    def search(self, query: Query) -> list[tuple[str, float]]:
        """Ranked (doc_id, score), score-descending then id-ascending.

        Results never include tombstoned or TTL-expired documents, even when
        served from a cached response: cached hits are re-filtered on the way
        out. The cache entries themselves keep whatever they kept - clearing
        is the only eviction.
        """
        with self._lock.read():
            response = self._cached_response(query)
            now = self.clock.now()
            return [
                (doc_id, score)
                for doc_id, score in response.hits
                if self._visible(doc_id, now)
            ]

    def aggregate(self, query: Query) -> dict[str, int]:
        if query.kind is not QueryKind.AGGREGATE:
            raise ValueError("aggregate() requires an aggregate query")
        with self._lock.read():
            response = self._cached_response(query)
            return dict(response.aggregations or {})

    def _visible(self, doc_id: str, now: float) -> bool:
        if doc_id in self._tombstoned:
            return False
        segment = self._doc_segment.get(doc_id)
        if segment is None:
            return False
        return not self._expired(segment.docs[doc_id], now)

    def _cached_response(self, query: Query) -> Response:
        key = f"v{self._version}|{query.cache_key()}"
        cached = self.caches.request.get(key)
        if cached is not None:
            return cached
        response = self._execute(query)
        self.caches.request.put(key, response)
        return response

    def _execute(self, query: Query) -> Response:
        if query.kind is QueryKind.BOOLEAN_AND:
            scores = self._execute_boolean(query)
        else:
            scores = {}
            for segment in [*self._segments, self._active]:
                for doc_id, score in segment.match(query).items():
                    scores[doc_id] = scores.get(doc_id, 0.0) + score
        now = self.clock.now()
        hits = sorted(
            ((doc_id, score) for doc_id, score in scores.items()
             if self._visible(doc_id, now)),
            key=lambda pair: (-pair[1], pair[0]),
        )
        sources = {}
        for doc_id, _score in hits[: self.config.top_sources]:
            stored = self.get_doc(doc_id)
            if stored is not None:
                sources[doc_id] = dict(stored.fields)
        aggregations = None
        if query.kind is QueryKind.AGGREGATE:
            aggregations = {}
            for doc_id, _score in hits:
                stored = self.get_doc(doc_id)
                if stored is None:
                    continue
                bucket = stored.fields.get(query.group_by or "", "")
                aggregations[bucket] = aggregations.get(bucket, 0) + 1
        return Response(hits=hits, sources=sources, aggregations=aggregations)

    def _execute_boolean(self, query: Query) -> dict[str, float]:
        """AND over terms, using the query cache for per-term posting merges."""
        per_term: list[dict[str, int]] = []
        for term in query.terms:
            cache_key = f"v{self._version}|t|{query.field}|{term}"
            postings = self.caches.query.get(cache_key)
            if postings is None:
                postings = {}
                for segment in [*self._segments, self._active]:
                    for doc_id, tf in segment.term_postings(query.field, term).items():
                        postings[doc_id] = postings.get(doc_id, 0) + tf
                self.caches.query.put(cache_key, postings)
            if not postings:
                return {}
            per_term.append(postings)
        per_term.sort(key=len)
        candidates = set(per_term[0])
        for postings in per_term[1:]:
            candidates &= postings.keys()
            if not candidates:
                return {}
        return {
            doc_id: float(sum(p[doc_id] for p in per_term))
            for doc_id in candidates
            if doc_id not in self._tombstoned
        }


def _file_sizes(segment: Segment) -> int:
    total = 0
    for path in (segment.path, segment.tombstone_path()):
        if path is not None and path.exists():
            total += path.stat().st_size
    return total
