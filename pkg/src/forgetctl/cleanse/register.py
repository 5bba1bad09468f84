"""Verification register.

Absence verification has a chicken-and-egg problem: to prove a document is
gone you must know what to grep for, but keeping a plaintext list of the
erased values would itself be retained personal data. The register holds, per
document, the subject id and the distinctive token set captured at indexing
time, in a single Fernet-encrypted file. The file is excluded from residue
scans by construction (the scanner never looks at it), and entries are purged
once the final verification for their erasure request has passed.

The key sits next to the data, which protects against nothing but casual
greps; the point is that sentinel bytes never appear verbatim in the file,
not key management.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Iterator, Optional

from cryptography.fernet import Fernet

from ..engine.documents import distinctive_tokens
from ..engine.segments import StoredDoc


class VerificationRegister:
    def __init__(self, directory: Path) -> None:
        self.directory = directory
        self.directory.mkdir(parents=True, exist_ok=True)
        self._data_path = self.directory / "register.bin"
        key_path = self.directory / "register.key"
        if key_path.exists():
            key = key_path.read_bytes()
        else:
            key = Fernet.generate_key()
            key_path.write_bytes(key)
        self._fernet = Fernet(key)
        # doc_id -> {"subject_ids": [...], "tokens": [...]}
        self._entries: dict[str, dict] = {}
        self._defer_saves = False
        self._load()

    def _load(self) -> None:
        if not self._data_path.exists():
            return
        blob = self._data_path.read_bytes()
        if not blob:
            return
        self._entries = json.loads(self._fernet.decrypt(blob).decode("utf-8"))

    def _save(self) -> None:
        if self._defer_saves:
            return
        blob = self._fernet.encrypt(json.dumps(self._entries).encode("utf-8"))
        self._data_path.write_bytes(blob)

    @contextmanager
    def bulk_load(self) -> Iterator["VerificationRegister"]:
        """Suspend per-record persistence during mass ingestion.

        Encrypting the whole register once per document makes bulk indexing
        quadratic in corpus size; inside this context the register stays
        in memory and is written exactly once on exit.
        """
        self._defer_saves = True
        try:
            yield self
        finally:
            self._defer_saves = False
            self._save()

    # ---- recording ----

    def record(self, stored: StoredDoc) -> None:
        doc = stored.to_document()
        self._entries[stored.doc_id] = {
            "subject_ids": sorted(doc.subject_ids()),
            "tokens": sorted(distinctive_tokens(doc)),
        }
        self._save()

    def listener(self):
        """Adapter for SearchEngine.index_listeners."""
        return self.record

    # ---- resolution ----

    def docs_for_subject(self, subject_id: str) -> set[str]:
        return {
            doc_id
            for doc_id, entry in self._entries.items()
            if subject_id in entry["subject_ids"]
        }

    def tokens_for_docs(self, doc_ids: Iterable[str]) -> set[str]:
        tokens: set[str] = set()
        for doc_id in doc_ids:
            entry = self._entries.get(doc_id)
            if entry:
                tokens.update(entry["tokens"])
        return tokens

    def known_doc_ids(self) -> set[str]:
        return set(self._entries)

    def has_subject(self, subject_id: str) -> bool:
        return bool(self.docs_for_subject(subject_id))

    # ---- purge ----

    def purge(self, doc_ids: Iterable[str]) -> int:
        """Drop entries once their erasure has been verified."""
        removed = 0
        for doc_id in list(doc_ids):
            if self._entries.pop(doc_id, None) is not None:
                removed += 1
        if removed:
            self._save()
        return removed
