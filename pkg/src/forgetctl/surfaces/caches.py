"""Request and query caches.

Two LRU caches sit in front of the engine: the request cache keys whole
queries to full responses (including stored fields), the query cache keys
individual term lookups to posting snapshots. Neither supports selective
eviction by document; the only way to get erased content out of a cache is to
clear it, which is exactly what the cleansing pipeline does. Hit and miss
counters survive a clear so benchmark runs can measure the cost of clearing.
"""

from __future__ import annotations

import json
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Any, Optional


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0


@dataclass(frozen=True)
class ClearReport:
    kind: str
    entries_removed: int


class LruCache:
    def __init__(self, capacity: int = 1024) -> None:
        if capacity < 1:
            raise ValueError("cache capacity must be >= 1")
        self.capacity = capacity
        self.stats = CacheStats()
        self._entries: "OrderedDict[str, Any]" = OrderedDict()
        # Concurrent readers populate the cache, so entry bookkeeping needs
        # its own mutex independent of the engine's readers-writer lock.
        self._mutex = threading.Lock()

    def __len__(self) -> int:
        with self._mutex:
            return len(self._entries)

    def get(self, key: str) -> Optional[Any]:
        with self._mutex:
            value = self._entries.get(key)
            if value is None:
                self.stats.misses += 1
                return None
            self._entries.move_to_end(key)
            self.stats.hits += 1
            return value

    def put(self, key: str, value: Any) -> None:
        with self._mutex:
            self._entries[key] = value
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)

    def clear(self) -> int:
        with self._mutex:
            removed = len(self._entries)
            self._entries.clear()
            return removed

    def dump_bytes(self) -> bytes:
        """Serialized view of keys and values, for residue scanning only."""
        with self._mutex:
            snapshot = {key: _plain(value) for key, value in self._entries.items()}
        return json.dumps(snapshot, default=str).encode("utf-8")


def _plain(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_plain(v) for v in value]
    if hasattr(value, "to_payload"):
        return _plain(value.to_payload())
    return repr(value)


class SearchCaches:
    """The cache pair, addressed by kind: request, query, or all."""

    KINDS = ("request", "query")

    def __init__(self, request_capacity: int = 512, query_capacity: int = 4096) -> None:
        self.request = LruCache(request_capacity)
        self.query = LruCache(query_capacity)

    def by_kind(self, kind: str) -> list[tuple[str, LruCache]]:
        if kind == "all":
            return [("request", self.request), ("query", self.query)]
        if kind == "request":
            return [("request", self.request)]
        if kind == "query":
            return [("query", self.query)]
        raise ValueError(f"unknown cache kind {kind!r}")

    def clear(self, kind: str = "all") -> list[ClearReport]:
        return [
            ClearReport(kind=name, entries_removed=cache.clear())
            for name, cache in self.by_kind(kind)
        ]

    def dump_bytes(self) -> bytes:
        return b"\n".join(
            name.encode("ascii") + b":" + cache.dump_bytes()
            for name, cache in self.by_kind("all")
        )
