"""The six query challenges and their parameter pools.

Each challenge repeatedly issues one query shape with parameters drawn from a
small deterministic pool, the way a replayed production workload mixes a
bounded set of distinct queries. The bounded pool matters to the impact
experiment: once warm, most queries are served from the request cache, so
clearing the caches mid-run has a cost the throughput series can actually
show.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from datetime import timedelta

import numpy as np

from ..engine.queries import Query
from .track import Track, _EPOCH_DATE, _DATE_SPAN_DAYS

CHALLENGE_NAMES = ("high-low", "prefix", "range", "fuzzy", "wildcard",
                   "agg-wc-fz")

DEFAULT_WARMUP = 200
DEFAULT_MEASURED = 500


@dataclass(frozen=True)
class Challenge:
    name: str
    warmup: int = DEFAULT_WARMUP
    measured: int = DEFAULT_MEASURED
    pool_size: int = 24

    def __post_init__(self) -> None:
        if self.name not in CHALLENGE_NAMES:
            raise ValueError(
                f"unknown challenge {self.name!r}; expected one of "
                f"{', '.join(CHALLENGE_NAMES)}")
        if self.warmup < 0 or self.measured < 0:
            raise ValueError("iteration counts must be >= 0")

    def query_pool(self, track: Track, seed: int) -> tuple[Query, ...]:
        return build_pool(self.name, track, self.pool_size, seed)

    def queries(self, track: Track, seed: int) -> tuple[Query, ...]:
        """The full iteration schedule: warmup then measured, pool cycled."""
        pool = self.query_pool(track, seed)
        total = self.warmup + self.measured
        return tuple(pool[i % len(pool)] for i in range(total))


def build_pool(name: str, track: Track, pool_size: int,
               seed: int) -> tuple[Query, ...]:
    """Deterministic parameter pool for one challenge over one track."""
    rng = np.random.default_rng((seed, zlib.crc32(name.encode())))
    vocab = track.vocabulary
    queries: list[Query] = []
    for _ in range(pool_size):
        if name == "high-low":
            high = vocab[int(rng.integers(0, 8))]
            low = vocab[int(rng.integers(len(vocab) // 8, len(vocab) - 1))]
            queries.append(Query.boolean_and((high, low), field="body"))
        elif name == "prefix":
            word = vocab[int(rng.integers(0, 64))]
            queries.append(Query.prefix_of(word[:3], field="body"))
        elif name == "range":
            start = int(rng.integers(0, _DATE_SPAN_DAYS - 90))
            span = int(rng.integers(30, 90))
            lower = _EPOCH_DATE + timedelta(days=start)
            upper = _EPOCH_DATE + timedelta(days=start + span)
            queries.append(Query.value_range(
                "date", lower.isoformat(), upper.isoformat()))
        elif name == "fuzzy":
            word = vocab[int(rng.integers(16, 256))]
            queries.append(Query.fuzzy_term(word, max_edits=1, field="body"))
        elif name == "wildcard":
            word = vocab[int(rng.integers(8, 128))]
            queries.append(Query.wildcard_pattern(
                f"{word[:3]}*{word[-2:]}", field="body"))
        elif name == "agg-wc-fz":
            w1 = vocab[int(rng.integers(8, 96))]
            w2 = vocab[int(rng.integers(16, 256))]
            queries.append(Query.aggregate_by(
                pattern=f"{w1[:4]}*", term=w2, group_by="tags",
                max_edits=1, field="body"))
    return tuple(queries)
