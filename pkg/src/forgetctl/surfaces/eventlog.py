"""Operational event log.

Line-oriented files, one record per line, level prefix first so grep and the
culling pass stay trivial. Data minimization is enforced at write time: at
the default level a payload may carry doc ids and field names but never field
values; raw values are only written when trace level was explicitly enabled.
Every record carries an expiry timestamp so retention stays bounded, and
log_cull rewrites files replacing erased values with a redaction marker that
names the erasure request, which keeps the log auditable without keeping the
data.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from ..errors import IoFailure

logger = logging.getLogger(__name__)

LEVELS = ("info", "trace")

# sentinel-shaped tokens are redacted in one pass over maximal hex runs
_HEX_RUN = re.compile(r"[0-9a-f]{16,}")
_HEX16 = re.compile(r"[0-9a-f]{16}\Z")


@dataclass(frozen=True)
class CullReport:
    files_rewritten: int
    occurrences_redacted: int


@dataclass(frozen=True)
class EventRecord:
    timestamp: float
    level: str
    event_code: str
    payload: dict
    expiry_at: float

    def encode(self) -> str:
        return "\t".join(
            (
                self.level.upper(),
                json.dumps(
                    {
                        "timestamp": self.timestamp,
                        "event_code": self.event_code,
                        "payload": self.payload,
                        "expiry_at": self.expiry_at,
                    },
                    separators=(",", ":"),
                ),
            )
        )

    @staticmethod
    def decode(line: str) -> "EventRecord":
        level, body = line.split("\t", 1)
        raw = json.loads(body)
        return EventRecord(
            timestamp=raw["timestamp"],
            level=level.lower(),
            event_code=raw["event_code"],
            payload=raw["payload"],
            expiry_at=raw["expiry_at"],
        )


class EventLog:
    def __init__(self, directory: Path, level: str = "info",
                 retention_seconds: float = 30 * 86_400.0) -> None:
        if level not in LEVELS:
            raise ValueError(f"unknown log level {level!r}")
        self.directory = directory
        self.level = level
        self.retention_seconds = retention_seconds
        self.directory.mkdir(parents=True, exist_ok=True)
        self._current = self.directory / "events.log"

    # ---- writes ----

    def log(self, event_code: str, payload: dict, timestamp: float,
            raw_values: Optional[dict] = None) -> EventRecord:
        """Append one record.

        payload must already be minimized (ids and names only); raw_values is
        merged in only when the log runs at trace level.
        """
        body = dict(payload)
        level = "info"
        if raw_values and self.level == "trace":
            body["raw"] = raw_values
            level = "trace"
        record = EventRecord(
            timestamp=timestamp,
            level=level,
            event_code=event_code,
            payload=body,
            expiry_at=timestamp + self.retention_seconds,
        )
        try:
            with self._current.open("a", encoding="utf-8") as handle:
                handle.write(record.encode() + "\n")
        except OSError as exc:
            raise IoFailure(f"event log append: {exc}") from exc
        return record

    # ---- reads ----

    def files(self) -> list[Path]:
        return sorted(self.directory.glob("*.log"))

    def records(self) -> Iterator[EventRecord]:
        for path in self.files():
            with path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.rstrip("\n")
                    if line:
                        yield EventRecord.decode(line)

    # ---- retention and culling ----

    def expire(self, now: float) -> int:
        """Drop records whose expiry passed; returns how many were removed."""
        removed = 0
        for path in self.files():
            kept: list[str] = []
            with path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    if EventRecord.decode(line).expiry_at <= now:
                        removed += 1
                    else:
                        kept.append(line)
            _rewrite(path, kept)
        return removed

    def cull(self, values: Iterable[str], request_id: str) -> CullReport:
        """Redact every occurrence of the given values across all log files.

        The replacement marker names the erasure request so later audits can
        see that a redaction happened here without learning what was removed.
        """
        marker = f"[REDACTED:{request_id}]"
        targets = [v for v in values if v]
        hex16 = {t for t in targets if _HEX16.match(t)}
        plain = [t for t in targets if t not in hex16]
        files_rewritten = 0
        occurrences = 0
        for path in self.files():
            text = path.read_text(encoding="utf-8")
            replaced, hits = _redact_hex(text, hex16, marker) if hex16 else (text, 0)
            occurrences += hits
            for value in plain:
                count = replaced.count(value)
                if count:
                    occurrences += count
                    replaced = replaced.replace(value, marker)
            if replaced != text:
                _rewrite(path, replaced.split("\n")[:-1] if replaced.endswith("\n")
                         else replaced.split("\n"))
                files_rewritten += 1
        return CullReport(files_rewritten=files_rewritten, occurrences_redacted=occurrences)


def _redact_hex(text: str, tokens: set[str], marker: str) -> tuple[str, int]:
    """Replace every occurrence of the given 16-char hex tokens in one pass.

    Any occurrence of such a token lies inside a maximal [0-9a-f]{16,} run, so
    scanning the 16-wide windows of each run finds exactly the substring
    matches without a per-token pass over the whole text. Matches are taken
    left to right without overlap, like repeated str.replace would.
    """
    pieces: list[str] = []
    cursor = 0
    hits = 0
    for run in _HEX_RUN.finditer(text):
        chunk = run.group()
        base = run.start()
        i = 0
        while i + 16 <= len(chunk):
            if chunk[i:i + 16] in tokens:
                pieces.append(text[cursor:base + i])
                pieces.append(marker)
                cursor = base + i + 16
                hits += 1
                i += 16
            else:
                i += 1
    if not hits:
        return text, 0
    pieces.append(text[cursor:])
    return "".join(pieces), hits


def _rewrite(path: Path, lines: list[str]) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        tmp.replace(path)
    except OSError as exc:
        raise IoFailure(f"rewriting log {path}: {exc}") from exc
