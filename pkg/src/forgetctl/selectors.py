"""Deletion selectors.

A selector names the documents an erasure operation targets: explicit doc ids,
every document tagged to one subject, or the result set of a query. Exactly
one of the three forms must be set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .engine.queries import Query


@dataclass(frozen=True)
class Selector:
    doc_ids: tuple[str, ...] = ()
    subject_id: Optional[str] = None
    query: Optional["Query"] = None

    def __post_init__(self) -> None:
        forms = sum((bool(self.doc_ids), self.subject_id is not None, self.query is not None))
        if forms != 1:
            raise ValueError("selector must set exactly one of doc_ids, subject_id, query")

    @staticmethod
    def for_docs(*doc_ids: str) -> "Selector":
        return Selector(doc_ids=tuple(doc_ids))

    @staticmethod
    def for_subject(subject_id: str) -> "Selector":
        return Selector(subject_id=subject_id)

    @staticmethod
    def for_query(query: "Query") -> "Selector":
        return Selector(query=query)

    def describe(self) -> str:
        if self.doc_ids:
            return "docs=" + ",".join(self.doc_ids)
        if self.subject_id is not None:
            return f"subject={self.subject_id}"
        return f"query={self.query!r}"

    def to_payload(self) -> dict:
        """JSON-friendly form used in translog entries and receipts."""
        if self.doc_ids:
            return {"doc_ids": list(self.doc_ids)}
        if self.subject_id is not None:
            return {"subject_id": self.subject_id}
        return {"query": self.query.to_payload()}  # type: ignore[union-attr]

    @staticmethod
    def from_payload(payload: dict) -> "Selector":
        if payload.get("doc_ids"):
            return Selector(doc_ids=tuple(payload["doc_ids"]))
        if payload.get("subject_id") is not None:
            return Selector(subject_id=payload["subject_id"])
        from .engine.queries import Query

        return Selector(query=Query.from_payload(payload["query"]))


def parse_selector(text: str) -> Selector:
    """Parse the CLI selector syntax: ``subject=<id>`` or ``docs=<id>[,<id>...]``.

    A bare token is treated as a subject id.
    """
    text = text.strip()
    if text.startswith("docs="):
        ids = [part for part in text[len("docs="):].split(",") if part]
        if not ids:
            raise ValueError("docs= selector needs at least one id")
        return Selector.for_docs(*ids)
    if text.startswith("subject="):
        return Selector.for_subject(text[len("subject="):])
    if not text or "=" in text:
        raise ValueError(f"unrecognized selector: {text!r}")
    return Selector.for_subject(text)
