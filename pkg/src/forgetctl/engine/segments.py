"""Index segments.

A segment holds stored documents plus per-field postings. The active segment
lives in memory and accepts appends; once it reaches the seal threshold (or a
flush forces the issue) it is sealed, persisted to a JSON file, and never
modified again except for tombstone additions, which live in a sidecar file
next to the segment so the segment bytes stay immutable. Sorted term lists
and per-field value indexes are derived, not persisted; they are rebuilt on
load.
"""

from __future__ import annotations

import bisect
import json
import logging
import os
from dataclasses import dataclass
from fnmatch import fnmatchcase
from pathlib import Path
from typing import Iterator, Optional

from ..errors import IoFailure
from .documents import Document, PiiTag, tokenize
from .queries import Query, QueryKind, levenshtein_within

logger = logging.getLogger(__name__)

SEGMENT_SUFFIX = ".seg"
TOMBSTONE_SUFFIX = ".tomb"


@dataclass
class StoredDoc:
    doc_id: str
    fields: dict[str, str]
    pii_tags: dict[str, PiiTag]
    indexed_at: float
    seq: int

    def to_payload(self) -> dict:
        return {
            "fields": self.fields,
            "pii_tags": {
                name: {
                    "subject_id": tag.subject_id,
                    "purpose": tag.purpose,
                    "ttl_seconds": tag.ttl_seconds,
                }
                for name, tag in self.pii_tags.items()
            },
            "indexed_at": self.indexed_at,
            "seq": self.seq,
        }

    @staticmethod
    def from_payload(doc_id: str, payload: dict) -> "StoredDoc":
        tags = {
            name: PiiTag(
                subject_id=raw["subject_id"],
                purpose=raw.get("purpose", "unspecified"),
                ttl_seconds=raw.get("ttl_seconds"),
            )
            for name, raw in payload.get("pii_tags", {}).items()
        }
        return StoredDoc(
            doc_id=doc_id,
            fields=dict(payload["fields"]),
            pii_tags=tags,
            indexed_at=float(payload["indexed_at"]),
            # Translog payloads omit seq: each engine assigns its own from its
            # own log, so replicated state stays comparable across nodes.
            seq=int(payload.get("seq", 0)),
        )

    def to_document(self) -> Document:
        return Document(doc_id=self.doc_id, fields=dict(self.fields),
                        pii_tags=dict(self.pii_tags))

    def expires_at(self) -> Optional[float]:
        ttls = [t.ttl_seconds for t in self.pii_tags.values() if t.ttl_seconds is not None]
        if not ttls:
            return None
        return self.indexed_at + min(ttls)


class Segment:
    def __init__(self, segment_id: str) -> None:
        self.segment_id = segment_id
        self.docs: dict[str, StoredDoc] = {}
        # field -> term -> doc_id -> term frequency
        self.postings: dict[str, dict[str, dict[str, int]]] = {}
        self.tombstones: set[str] = set()
        self.sealed = False
        self.path: Optional[Path] = None
        self._sorted_terms: dict[str, list[str]] = {}
        self._value_index: dict[str, list[tuple[str, str]]] = {}
        self._derived_stale = True

    def __len__(self) -> int:
        return len(self.docs)

    @property
    def live_count(self) -> int:
        return len(self.docs) - len(self.tombstones & self.docs.keys())

    # ---- writes ----

    def add(self, doc: StoredDoc) -> None:
        if self.sealed:
            raise IoFailure(f"segment {self.segment_id} is sealed")
        self.docs[doc.doc_id] = doc
        for field_name, value in doc.fields.items():
            field_postings = self.postings.setdefault(field_name, {})
            for token in tokenize(value):
                entry = field_postings.setdefault(token, {})
                entry[doc.doc_id] = entry.get(doc.doc_id, 0) + 1
        self._derived_stale = True

    def seal(self) -> None:
        self.sealed = True

    def remove_docs(self, doc_ids: set[str]) -> int:
        """Drop documents and their postings entries in place.

        Only legal as part of an expunging rewrite (the caller persists the
        result); per-doc cost is bounded by the doc's own token set rather
        than the whole posting table.
        """
        removed = 0
        for doc_id in doc_ids:
            doc = self.docs.pop(doc_id, None)
            if doc is None:
                continue
            removed += 1
            for field_name, value in doc.fields.items():
                field_postings = self.postings.get(field_name)
                if not field_postings:
                    continue
                for token in set(tokenize(value)):
                    entry = field_postings.get(token)
                    if entry is None:
                        continue
                    entry.pop(doc_id, None)
                    if not entry:
                        del field_postings[token]
                if not field_postings:
                    self.postings.pop(field_name, None)
            self.tombstones.discard(doc_id)
        if removed:
            self._derived_stale = True
        return removed

    # ---- derived structures ----

    def _refresh_derived(self) -> None:
        if not self._derived_stale:
            return
        self._sorted_terms = {
            field_name: sorted(terms) for field_name, terms in self.postings.items()
        }
        self._value_index = {}
        for doc in self.docs.values():
            for field_name, value in doc.fields.items():
                self._value_index.setdefault(field_name, []).append((value, doc.doc_id))
        for entries in self._value_index.values():
            entries.sort()
        self._derived_stale = False

    def fields_present(self) -> list[str]:
        return list(self.postings.keys())

    def vocabulary(self, field: Optional[str]) -> Iterator[tuple[str, str]]:
        """Yields (field, term) pairs, restricted to one field when given."""
        self._refresh_derived()
        if field is not None:
            for term in self._sorted_terms.get(field, ()):
                yield field, term
            return
        for field_name, terms in self._sorted_terms.items():
            for term in terms:
                yield field_name, term

    # ---- matching (tombstones filtered here; TTL filtering is the engine's) ----

    def _live(self, doc_id: str) -> bool:
        return doc_id not in self.tombstones

    def term_postings(self, field: Optional[str], term: str) -> dict[str, int]:
        merged: dict[str, int] = {}
        field_names = [field] if field is not None else list(self.postings.keys())
        for field_name in field_names:
            entry = self.postings.get(field_name, {}).get(term)
            if entry:
                for doc_id, tf in entry.items():
                    merged[doc_id] = merged.get(doc_id, 0) + tf
        return merged

    def match(self, query: Query) -> dict[str, float]:
        kind = query.kind
        if kind is QueryKind.BOOLEAN_AND:
            return self._match_boolean_and(query)
        if kind is QueryKind.PREFIX:
            return self._match_prefix(query)
        if kind is QueryKind.RANGE:
            return self._match_range(query)
        if kind is QueryKind.FUZZY:
            return self._match_terms(query.field,
                                     self._fuzzy_terms(query.field, query.term or "",
                                                       query.max_edits))
        if kind is QueryKind.WILDCARD:
            return self._match_terms(query.field,
                                     self._wildcard_terms(query.field, query.pattern or ""))
        if kind is QueryKind.AGGREGATE:
            matched = set(self._wildcard_terms(query.field, query.pattern or ""))
            matched.update(self._fuzzy_terms(query.field, query.term or "", query.max_edits))
            return self._match_terms(query.field, matched)
        raise AssertionError(f"unhandled query kind {kind}")  # pragma: no cover

    def _match_boolean_and(self, query: Query) -> dict[str, float]:
        per_term = [self.term_postings(query.field, term) for term in query.terms]
        if not per_term or any(not postings for postings in per_term):
            return {}
        per_term.sort(key=len)
        candidates = set(per_term[0])
        for postings in per_term[1:]:
            candidates &= postings.keys()
            if not candidates:
                return {}
        return {
            doc_id: float(sum(postings[doc_id] for postings in per_term))
            for doc_id in candidates
            if self._live(doc_id)
        }

    def _terms_with_prefix(self, field: Optional[str], prefix: str) -> list[tuple[str, str]]:
        self._refresh_derived()
        found: list[tuple[str, str]] = []
        field_names = [field] if field is not None else list(self._sorted_terms.keys())
        for field_name in field_names:
            terms = self._sorted_terms.get(field_name, [])
            start = bisect.bisect_left(terms, prefix)
            for index in range(start, len(terms)):
                if not terms[index].startswith(prefix):
                    break
                found.append((field_name, terms[index]))
        return found

    def _match_prefix(self, query: Query) -> dict[str, float]:
        scores: dict[str, float] = {}
        for field_name, term in self._terms_with_prefix(query.field, query.prefix or ""):
            for doc_id, tf in self.postings[field_name][term].items():
                if self._live(doc_id):
                    scores[doc_id] = scores.get(doc_id, 0.0) + tf
        return scores

    def _match_range(self, query: Query) -> dict[str, float]:
        self._refresh_derived()
        entries = self._value_index.get(query.field or "", [])
        if not entries:
            return {}
        lo = 0
        if query.lower is not None:
            lo = bisect.bisect_left(entries, (query.lower, ""))
        hi = len(entries)
        if query.upper is not None:
            hi = bisect.bisect_right(entries, (query.upper, "￿"))
        return {
            doc_id: 1.0
            for _value, doc_id in entries[lo:hi]
            if self._live(doc_id)
        }

    def _fuzzy_terms(self, field: Optional[str], term: str, max_edits: int) -> list[tuple[str, str]]:
        matches = []
        for field_name, candidate in self.vocabulary(field):
            if levenshtein_within(term, candidate, max_edits):
                matches.append((field_name, candidate))
        return matches

    def _wildcard_terms(self, field: Optional[str], pattern: str) -> list[tuple[str, str]]:
        # A literal prefix in the pattern narrows the scan via the sorted term list.
        cut = len(pattern)
        for index, char in enumerate(pattern):
            if char in "*?[":
                cut = index
                break
        literal_prefix = pattern[:cut]
        if literal_prefix:
            candidates = self._terms_with_prefix(field, literal_prefix)
        else:
            candidates = list(self.vocabulary(field))
        return [
            (field_name, term)
            for field_name, term in candidates
            if fnmatchcase(term, pattern)
        ]

    def _match_terms(self, field: Optional[str],
                     matched: "list[tuple[str, str]] | set[tuple[str, str]]") -> dict[str, float]:
        scores: dict[str, float] = {}
        for field_name, term in matched:
            entry = self.postings.get(field_name, {}).get(term, {})
            for doc_id, tf in entry.items():
                if self._live(doc_id):
                    scores[doc_id] = scores.get(doc_id, 0.0) + tf
        return scores

    # ---- persistence ----

    def persist(self, directory: Path) -> Path:
        payload = {
            "segment_id": self.segment_id,
            "docs": {doc_id: doc.to_payload() for doc_id, doc in self.docs.items()},
            "postings": self.postings,
        }
        path = directory / f"{self.segment_id}{SEGMENT_SUFFIX}"
        tmp = path.with_suffix(path.suffix + ".tmp")
        try:
            tmp.write_text(json.dumps(payload, separators=(",", ":")), encoding="utf-8")
            os.replace(tmp, path)
        except OSError as exc:
            raise IoFailure(f"persisting segment {self.segment_id}: {exc}") from exc
        self.path = path
        return path

    def tombstone_path(self) -> Optional[Path]:
        if self.path is None:
            return None
        return self.path.with_suffix(TOMBSTONE_SUFFIX)

    def persist_tombstones(self) -> None:
        path = self.tombstone_path()
        if path is None:
            return
        try:
            if self.tombstones:
                path.write_text(json.dumps(sorted(self.tombstones)), encoding="utf-8")
            elif path.exists():
                path.unlink()
        except OSError as exc:
            raise IoFailure(f"persisting tombstones for {self.segment_id}: {exc}") from exc

    def delete_files(self) -> int:
        """Remove the segment file and its sidecar; returns bytes freed."""
        freed = 0
        for path in (self.path, self.tombstone_path()):
            if path is not None and path.exists():
                freed += path.stat().st_size
                path.unlink()
        self.path = None
        return freed

    @classmethod
    def load(cls, path: Path) -> "Segment":
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise IoFailure(f"loading segment {path}: {exc}") from exc
        segment = cls(payload["segment_id"])
        segment.docs = {
            doc_id: StoredDoc.from_payload(doc_id, raw)
            for doc_id, raw in payload["docs"].items()
        }
        segment.postings = {
            field_name: {term: dict(entry) for term, entry in terms.items()}
            for field_name, terms in payload["postings"].items()
        }
        segment.sealed = True
        segment.path = path
        tomb = segment.tombstone_path()
        if tomb is not None and tomb.exists():
            segment.tombstones = set(json.loads(tomb.read_text(encoding="utf-8")))
        return segment
