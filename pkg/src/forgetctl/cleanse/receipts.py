"""Propagation receipts.

A receipt records, for one erasure run, the status of every cleansing step on
every side (primary and, when registered, replica). Receipts are persisted as
JSON after every step transition so a crash mid-run leaves an accurate
partial record and the run can be resumed. Receipts never contain field
values; the selector is stored in its id form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..errors import NotFound

CLEANSING_STEPS = (
    "expunge_segments",
    "clear_caches",
    "flush_translog",
    "rewrite_snapshots",
    "cull_logs",
)


@dataclass
class StepStatus:
    step: str
    side: str                       # "primary" | "replica"
    state: str = "pending"          # "pending" | "done" | "failed"
    finished_at: Optional[float] = None
    detail: str = ""

    def to_payload(self) -> dict:
        return {"step": self.step, "side": self.side, "state": self.state,
                "finished_at": self.finished_at, "detail": self.detail}

    @staticmethod
    def from_payload(raw: dict) -> "StepStatus":
        return StepStatus(step=raw["step"], side=raw["side"], state=raw["state"],
                          finished_at=raw.get("finished_at"), detail=raw.get("detail", ""))


@dataclass
class PropagationReceipt:
    receipt_id: str
    selector_text: str
    selector_payload: dict
    doc_ids: tuple[str, ...]
    deadline_seconds: float
    started_at: float
    steps: list[StepStatus] = field(default_factory=list)
    completed_at: Optional[float] = None
    deadline_met: Optional[bool] = None

    @property
    def all_done(self) -> bool:
        return bool(self.steps) and all(s.state == "done" for s in self.steps)

    def status_of(self, step: str, side: str) -> StepStatus:
        for status in self.steps:
            if status.step == step and status.side == side:
                return status
        raise KeyError((step, side))

    def to_payload(self) -> dict:
        return {
            "receipt_id": self.receipt_id,
            "selector": self.selector_text,
            "selector_payload": self.selector_payload,
            "doc_ids": list(self.doc_ids),
            "deadline_seconds": self.deadline_seconds,
            "started_at": self.started_at,
            "completed_at": self.completed_at,
            "deadline_met": self.deadline_met,
            "all_done": self.all_done,
            "steps": [s.to_payload() for s in self.steps],
        }

    @staticmethod
    def from_payload(raw: dict) -> "PropagationReceipt":
        receipt = PropagationReceipt(
            receipt_id=raw["receipt_id"],
            selector_text=raw["selector"],
            selector_payload=raw.get("selector_payload", {}),
            doc_ids=tuple(raw.get("doc_ids", ())),
            deadline_seconds=raw["deadline_seconds"],
            started_at=raw["started_at"],
            completed_at=raw.get("completed_at"),
            deadline_met=raw.get("deadline_met"),
        )
        receipt.steps = [StepStatus.from_payload(s) for s in raw.get("steps", [])]
        return receipt


class ReceiptStore:
    def __init__(self, directory: Path) -> None:
        self.directory = directory
        self.directory.mkdir(parents=True, exist_ok=True)
        self._counter = len(list(self.directory.glob("rcpt-*.json")))

    def next_id(self) -> str:
        self._counter += 1
        return f"rcpt-{self._counter:06d}"

    def save(self, receipt: PropagationReceipt) -> None:
        path = self.directory / f"{receipt.receipt_id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(receipt.to_payload(), indent=2), encoding="utf-8")
        tmp.replace(path)

    def load(self, receipt_id: str) -> PropagationReceipt:
        path = self.directory / f"{receipt_id}.json"
        if not path.exists():
            raise NotFound(f"receipt {receipt_id}")
        return PropagationReceipt.from_payload(json.loads(path.read_text(encoding="utf-8")))

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("rcpt-*.json"))
