"""Query model.

Six kinds, mirroring the workload mix the benchmark exercises. A query is a
frozen dataclass so it can serve as a cache key; validation happens at
construction and raises MalformedQuery rather than failing deep inside a
segment scan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..errors import MalformedQuery


class QueryKind(str, Enum):
    BOOLEAN_AND = "boolean-and-highlow"
    PREFIX = "prefix"
    RANGE = "range"
    FUZZY = "fuzzy"
    WILDCARD = "wildcard"
    AGGREGATE = "aggregate"


@dataclass(frozen=True)
class Query:
    kind: QueryKind
    field: Optional[str] = None          # None = match across all fields
    terms: tuple[str, ...] = ()          # boolean-and
    prefix: Optional[str] = None         # prefix
    lower: Optional[str] = None          # range (inclusive)
    upper: Optional[str] = None          # range (inclusive)
    term: Optional[str] = None           # fuzzy
    max_edits: int = 1                   # fuzzy / aggregate
    pattern: Optional[str] = None        # wildcard / aggregate
    group_by: Optional[str] = None       # aggregate

    def __post_init__(self) -> None:
        kind = self.kind
        if kind is QueryKind.BOOLEAN_AND:
            if len(self.terms) < 2:
                raise MalformedQuery("boolean-and needs at least two terms")
        elif kind is QueryKind.PREFIX:
            if not self.prefix:
                raise MalformedQuery("prefix query needs a non-empty prefix")
        elif kind is QueryKind.RANGE:
            if self.field is None:
                raise MalformedQuery("range query needs a field")
            if self.lower is None and self.upper is None:
                raise MalformedQuery("range query needs at least one bound")
            if self.lower is not None and self.upper is not None and self.lower > self.upper:
                raise MalformedQuery("range lower bound exceeds upper bound")
        elif kind is QueryKind.FUZZY:
            if not self.term:
                raise MalformedQuery("fuzzy query needs a term")
            if self.max_edits not in (1, 2):
                raise MalformedQuery("fuzzy max_edits must be 1 or 2")
        elif kind is QueryKind.WILDCARD:
            if not self.pattern or not any(c in self.pattern for c in "*?"):
                raise MalformedQuery("wildcard query needs a pattern containing * or ?")
        elif kind is QueryKind.AGGREGATE:
            # Wildcard-driven fuzzy matching followed by a group-by count.
            if not self.pattern or not self.term:
                raise MalformedQuery("aggregate query needs pattern and term")
            if not self.group_by:
                raise MalformedQuery("aggregate query needs a group_by field")
        else:  # pragma: no cover - enum is closed
            raise MalformedQuery(f"unknown query kind {kind!r}")

    # ---- helpers ----

    @staticmethod
    def boolean_and(terms: tuple[str, ...] | list[str], field: Optional[str] = None) -> "Query":
        return Query(kind=QueryKind.BOOLEAN_AND, terms=tuple(terms), field=field)

    @staticmethod
    def prefix_of(prefix: str, field: Optional[str] = None) -> "Query":
        return Query(kind=QueryKind.PREFIX, prefix=prefix, field=field)

    @staticmethod
    def value_range(field: str, lower: Optional[str], upper: Optional[str]) -> "Query":
        return Query(kind=QueryKind.RANGE, field=field, lower=lower, upper=upper)

    @staticmethod
    def fuzzy_term(term: str, max_edits: int = 1, field: Optional[str] = None) -> "Query":
        return Query(kind=QueryKind.FUZZY, term=term, max_edits=max_edits, field=field)

    @staticmethod
    def wildcard_pattern(pattern: str, field: Optional[str] = None) -> "Query":
        return Query(kind=QueryKind.WILDCARD, pattern=pattern, field=field)

    @staticmethod
    def aggregate_by(pattern: str, term: str, group_by: str, max_edits: int = 1,
                     field: Optional[str] = None) -> "Query":
        return Query(kind=QueryKind.AGGREGATE, pattern=pattern, term=term,
                     group_by=group_by, max_edits=max_edits, field=field)

    def cache_key(self) -> str:
        return repr(self)

    def to_payload(self) -> dict:
        payload: dict = {"kind": self.kind.value}
        for name in ("field", "prefix", "lower", "upper", "term", "pattern", "group_by"):
            value = getattr(self, name)
            if value is not None:
                payload[name] = value
        if self.terms:
            payload["terms"] = list(self.terms)
        if self.kind in (QueryKind.FUZZY, QueryKind.AGGREGATE):
            payload["max_edits"] = self.max_edits
        return payload

    @staticmethod
    def from_payload(payload: dict) -> "Query":
        data = dict(payload)
        kind = QueryKind(data.pop("kind"))
        terms = tuple(data.pop("terms", ()))
        return Query(kind=kind, terms=terms, **data)


def levenshtein_within(a: str, b: str, limit: int) -> bool:
    """True when edit distance(a, b) <= limit. Early-outs on the length gap."""
    if a == b:
        return True
    la, lb = len(a), len(b)
    if abs(la - lb) > limit:
        return False
    if la > lb:
        a, b, la, lb = b, a, lb, la
    previous = list(range(la + 1))
    for j in range(1, lb + 1):
        bj = b[j - 1]
        current = [j]
        best = j
        for i in range(1, la + 1):
            cost = 0 if a[i - 1] == bj else 1
            value = min(previous[i] + 1, current[i - 1] + 1, previous[i - 1] + cost)
            current.append(value)
            if value < best:
                best = value
        if best > limit:
            return False
        previous = current
    return previous[la] <= limit
