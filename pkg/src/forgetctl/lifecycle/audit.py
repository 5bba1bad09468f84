"""Minimized, append-only audit trail for request processing.

Every state transition lands here exactly once. Records carry ids, event
names, and scan statistics - never document field values, so erasing the
documents never requires erasing the audit of their erasure. Records expire:
keeping process metadata forever would itself be a retention violation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from ..clock import days


@dataclass(frozen=True)
class AuditRecord:
    timestamp: float
    request_id: str
    event: str
    details: dict
    expiry_at: float

    def encode(self) -> str:
        return json.dumps({
            "timestamp": self.timestamp,
            "request_id": self.request_id,
            "event": self.event,
            "details": self.details,
            "expiry_at": self.expiry_at,
        }, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def decode(line: str) -> "AuditRecord":
        raw = json.loads(line)
        return AuditRecord(timestamp=raw["timestamp"], request_id=raw["request_id"],
                           event=raw["event"], details=raw["details"],
                           expiry_at=raw["expiry_at"])


class AuditTrail:
    def __init__(self, directory: Path, retention_seconds: float = days(365)) -> None:
        self.directory = directory
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / "audit.jsonl"
        self.retention_seconds = retention_seconds

    def record(self, request_id: str, event: str, timestamp: float,
               details: Optional[dict] = None) -> AuditRecord:
        entry = AuditRecord(timestamp=timestamp, request_id=request_id, event=event,
                            details=details or {},
                            expiry_at=timestamp + self.retention_seconds)
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(entry.encode() + "\n")
        return entry

    def records(self, request_id: Optional[str] = None) -> Iterator[AuditRecord]:
        if not self.path.exists():
            return
        with self.path.open("r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                entry = AuditRecord.decode(line)
                if request_id is None or entry.request_id == request_id:
                    yield entry

    def expire(self, now: float) -> int:
        """Drop records past their expiry; returns how many were removed."""
        kept: list[str] = []
        dropped = 0
        for entry in self.records():
            if entry.expiry_at <= now:
                dropped += 1
            else:
                kept.append(entry.encode())
        if dropped:
            tmp = self.path.with_suffix(".tmp")
            tmp.write_text("".join(line + "\n" for line in kept), encoding="utf-8")
            tmp.replace(self.path)
        return dropped

    def raw_bytes(self) -> bytes:
        return self.path.read_bytes() if self.path.exists() else b""
