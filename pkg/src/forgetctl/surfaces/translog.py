"""Write-ahead translog.

Single append-only file of length-prefixed records: 4-byte big-endian length
followed by a JSON payload. Appends are flushed to the OS before the write is
acknowledged; recovery replays the whole file in order. The file is truncated
only by an engine flush, which first commits in-memory state to segments, so
no acknowledged write can be lost by a restart.

The JSON body intentionally keeps document content as plain bytes on disk:
the translog is one of the surfaces the residue scanner greps, and erasing a
document is not done until a flush has truncated its translog bytes.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Literal

from ..errors import IoFailure

_LEN = struct.Struct(">I")

Op = Literal["index", "mark_delete", "update"]


@dataclass(frozen=True)
class TranslogEntry:
    seq_no: int
    op: Op
    payload: dict
    timestamp: float

    def encode(self) -> bytes:
        body = json.dumps(
            {"seq_no": self.seq_no, "op": self.op, "payload": self.payload,
             "timestamp": self.timestamp},
            separators=(",", ":"),
        ).encode("utf-8")
        return _LEN.pack(len(body)) + body

    @staticmethod
    def decode(body: bytes) -> "TranslogEntry":
        raw = json.loads(body.decode("utf-8"))
        return TranslogEntry(seq_no=raw["seq_no"], op=raw["op"], payload=raw["payload"],
                             timestamp=raw["timestamp"])


class Translog:
    """The recovery log. One per engine instance.

    flush_threshold_size bounds the file: the owning engine checks the size at
    the end of each mutation and flushes when the threshold is exceeded, which
    truncates the log. The check runs after the whole mutation completes so a
    flush can never truncate an entry whose document has not reached a segment
    yet.
    """

    DEFAULT_FLUSH_THRESHOLD = 1 * 1024 * 1024  # 1 MiB

    def __init__(self, path: Path, flush_threshold_size: int = DEFAULT_FLUSH_THRESHOLD) -> None:
        self.path = path
        self.flush_threshold_size = flush_threshold_size
        self._next_seq = 1
        self._size = 0
        self._entries = 0
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.exists():
            self._recover_tail_tolerant()
        else:
            self.path.touch()

    def _recover_tail_tolerant(self) -> None:
        """Scan the log on open; a torn final record is dropped, not fatal.

        A record torn by a crash mid-write was never acknowledged to any
        caller, so truncating it back out restores the last consistent state.
        Corruption inside a complete record is a different animal and still
        raises.
        """
        last_good = 0
        with self.path.open("rb") as handle:
            while True:
                header = handle.read(_LEN.size)
                if not header:
                    break
                if len(header) < _LEN.size:
                    self._truncate_at(last_good)
                    break
                (length,) = _LEN.unpack(header)
                body = handle.read(length)
                if len(body) < length:
                    self._truncate_at(last_good)
                    break
                entry = TranslogEntry.decode(body)
                last_good += _LEN.size + length
                self._next_seq = max(self._next_seq, entry.seq_no + 1)
                self._entries += 1
        self._size = self.path.stat().st_size

    def _truncate_at(self, offset: int) -> None:
        with self.path.open("rb+") as handle:
            handle.truncate(offset)

    @property
    def size_bytes(self) -> int:
        return self._size

    @property
    def entry_count(self) -> int:
        return self._entries

    def append(self, op: Op, payload: dict, timestamp: float) -> TranslogEntry:
        entry = TranslogEntry(seq_no=self._next_seq, op=op, payload=payload,
                              timestamp=timestamp)
        encoded = entry.encode()
        try:
            with self.path.open("ab") as handle:
                handle.write(encoded)
                handle.flush()
        except OSError as exc:
            raise IoFailure(f"translog append: {exc}") from exc
        self._next_seq += 1
        self._size += len(encoded)
        self._entries += 1
        return entry

    def replay(self) -> Iterator[TranslogEntry]:
        if not self.path.exists():
            return
        with self.path.open("rb") as handle:
            while True:
                header = handle.read(_LEN.size)
                if not header:
                    return
                if len(header) < _LEN.size:
                    raise IoFailure("translog truncated mid-header")
                (length,) = _LEN.unpack(header)
                body = handle.read(length)
                if len(body) < length:
                    raise IoFailure("translog truncated mid-record")
                yield TranslogEntry.decode(body)

    def truncate(self) -> int:
        """Drop all entries; returns the number of bytes discarded."""
        discarded = self._size
        try:
            with self.path.open("wb"):
                pass
        except OSError as exc:
            raise IoFailure(f"translog truncate: {exc}") from exc
        self._size = 0
        self._entries = 0
        return discarded
