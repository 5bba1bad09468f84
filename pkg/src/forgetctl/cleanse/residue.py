"""Absence verification by byte scan.

The verifier never asks the engine whether a document exists; it walks the
raw bytes of every surface where a copy could hide and greps for the
document's distinctive tokens. Surfaces: segment files, tombstone sidecars,
the translog, every snapshot file, every event-log file, a serialized dump of
both caches, and the same set again on the replica. The verification register
and receipt store are deliberately out of scope: the register is the
encrypted lookup table that tells the verifier what to grep for, and receipts
never carry field values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from ..engine.core import SearchEngine

_HEX_RUN = re.compile(rb"[0-9a-f]{16,}")
_HEX16 = re.compile(r"[0-9a-f]{16}\Z")


@dataclass(frozen=True)
class ResidueMatch:
    surface: str       # e.g. "primary/segments", "replica/cache"
    location: str      # file path or cache label
    token: str

    def to_payload(self) -> dict:
        return {"surface": self.surface, "location": self.location, "token": self.token}


@dataclass(frozen=True)
class ResidueReport:
    selector: str
    tokens_checked: tuple[str, ...]
    matches: tuple[ResidueMatch, ...]
    scanned_files: int
    scanned_bytes: int

    @property
    def clean(self) -> bool:
        return not self.matches

    def to_payload(self) -> dict:
        return {
            "selector": self.selector,
            "tokens_checked": len(self.tokens_checked),
            "matches": [m.to_payload() for m in self.matches],
            "scanned_files": self.scanned_files,
            "scanned_bytes": self.scanned_bytes,
            "clean": self.clean,
        }


def _tokens_in(data: bytes, plain: list[tuple[str, bytes]],
               hex16: set[bytes]) -> list[str]:
    """All given tokens occurring in data, as substrings, sorted.

    Plain tokens use direct substring search. The 16-hex sentinel tokens are
    found in one pass instead of one scan each: any embedded occurrence lies
    inside a maximal run of hex characters, so scanning runs of 16+ and
    checking their 16-wide windows is exactly substring search, just linear
    in the file size rather than in files x tokens.
    """
    found = {token for token, raw in plain if raw in data}
    if hex16:
        hits: set[bytes] = set()
        for run in _HEX_RUN.findall(data):
            for i in range(len(run) - 15):
                window = run[i:i + 16]
                if window in hex16:
                    hits.add(window)
        found.update(h.decode("ascii") for h in hits)
    return sorted(found)


def scan_for_tokens(engine: SearchEngine, tokens: Iterable[str],
                    selector_text: str = "") -> ResidueReport:
    """Scan one engine (and its replica, if any) for the given byte tokens."""
    token_bytes = sorted({t for t in tokens if t})
    plain = [(t, t.encode("utf-8")) for t in token_bytes
             if not _HEX16.match(t)]
    hex16 = {t.encode("ascii") for t in token_bytes if _HEX16.match(t)}
    matches: list[ResidueMatch] = []
    files = 0
    size = 0

    def scan_engine(target: SearchEngine, label: str) -> None:
        nonlocal files, size
        with target.read_lock():
            for surface, paths in target.surface_paths().items():
                for path in paths:
                    files += 1
                    data = _read(path)
                    size += len(data)
                    for token in _tokens_in(data, plain, hex16):
                        matches.append(ResidueMatch(
                            surface=f"{label}/{surface}", location=str(path),
                            token=token))
            dump = target.caches.dump_bytes()
            size += len(dump)
            for token in _tokens_in(dump, plain, hex16):
                matches.append(ResidueMatch(
                    surface=f"{label}/cache", location="cache-dump", token=token))

    scan_engine(engine, engine.name)
    if engine.replica is not None:
        scan_engine(engine.replica, engine.replica.name)

    return ResidueReport(
        selector=selector_text,
        tokens_checked=tuple(token_bytes),
        matches=tuple(matches),
        scanned_files=files,
        scanned_bytes=size,
    )


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError:
        return b""
