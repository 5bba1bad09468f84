"""Documents and personal-data tags.

A document is a flat map of string fields. Any field holding personal data
must carry a PiiTag naming the data subject; a small denylist of field names
(email, phone) is always treated as personal and indexing fails if such a
field arrives untagged. Document ids are system-generated opaque strings and
must never double as a personal field value, so that erasing the data never
breaks referential integrity of the id space.

Distinctive tokens: tests and the absence verifier rely on a convention that
personal content is greppable. Every value of a tagged field counts, plus any
16-hex-char token embedded in any field (the sentinel convention used by the
test corpus and the benchmark track generator).
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field
from typing import Optional

from ..errors import UntaggedPersonalData

# Field names that are personal data no matter what the caller says.
PII_FIELD_DENYLIST = frozenset({"email", "phone"})

SENTINEL_PATTERN = re.compile(r"\b[0-9a-f]{16}\b")

_TOKEN_SPLIT = re.compile(r"[^0-9a-zA-Z@.\-_]+")


@dataclass(frozen=True)
class PiiTag:
    """Marks one field as personal data.

    subject_id ties the field to a data subject; purpose doubles as the data
    category consulted by retention rules; ttl_seconds, when set, bounds how
    long the field may be retained before the sweep enqueues it for cleansing.
    """

    subject_id: str
    purpose: str = "unspecified"
    ttl_seconds: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.subject_id:
            raise ValueError("PiiTag.subject_id must be non-empty")
        if self.ttl_seconds is not None and self.ttl_seconds <= 0:
            raise ValueError("PiiTag.ttl_seconds must be positive")


@dataclass(frozen=True)
class Document:
    doc_id: str
    fields: dict[str, str]
    pii_tags: dict[str, PiiTag] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        for name, value in self.fields.items():
            if not isinstance(value, str):
                raise TypeError(f"field {name!r} must be a string")
            # An id that equals a personal value would survive every erasure
            # that keys on ids, so the two namespaces are kept disjoint.
            if value == self.doc_id:
                raise ValueError(f"doc_id must not equal the value of field {name!r}")
        for name in self.pii_tags:
            if name not in self.fields:
                raise ValueError(f"pii tag for unknown field {name!r}")
        untagged = [
            name
            for name in self.fields
            if name.lower() in PII_FIELD_DENYLIST and name not in self.pii_tags
        ]
        if untagged:
            raise UntaggedPersonalData(
                f"denylisted personal fields indexed without tags: {sorted(untagged)}"
            )

    @staticmethod
    def create(fields: dict[str, str], pii_tags: Optional[dict[str, PiiTag]] = None) -> "Document":
        """Build a document with a fresh system-generated id."""
        return Document(doc_id=f"doc-{uuid.uuid4().hex[:20]}", fields=dict(fields),
                        pii_tags=dict(pii_tags or {}))

    def subject_ids(self) -> set[str]:
        return {tag.subject_id for tag in self.pii_tags.values()}

    def min_ttl_seconds(self) -> Optional[float]:
        ttls = [t.ttl_seconds for t in self.pii_tags.values() if t.ttl_seconds is not None]
        return min(ttls) if ttls else None

    def purposes(self) -> set[str]:
        return {tag.purpose for tag in self.pii_tags.values()}


def tokenize(value: str) -> list[str]:
    """Lowercased alphanumeric-ish tokens; keeps emails and hex sentinels whole."""
    return [t for t in _TOKEN_SPLIT.split(value.lower()) if t]


def distinctive_tokens(doc: Document) -> frozenset[str]:
    """Byte strings whose presence anywhere counts as residue of this document.

    Tagged field values are included verbatim and lowercased (the index stores
    lowercased tokens); untagged fields contribute only embedded hex
    sentinels, which are unique by construction in the test corpora.
    """
    tokens: set[str] = set()
    for name, value in doc.fields.items():
        for match in SENTINEL_PATTERN.findall(value.lower()):
            tokens.add(match)
        if name in doc.pii_tags:
            tokens.add(value)
            if value.lower() != value:
                tokens.add(value.lower())
    return frozenset(tokens)
