from .translog import Translog, TranslogEntry
from .caches import CacheStats, ClearReport, LruCache, SearchCaches
from .eventlog import CullReport, EventLog
from .snapshots import Snapshot, SnapshotStore

__all__ = [
    "Translog",
    "TranslogEntry",
    "LruCache",
    "SearchCaches",
    "CacheStats",
    "ClearReport",
    "EventLog",
    "CullReport",
    "Snapshot",
    "SnapshotStore",
]
