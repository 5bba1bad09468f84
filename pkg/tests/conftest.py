from __future__ import annotations

import itertools
from pathlib import Path

import pytest

from forgetctl.clock import SimulatedClock
from forgetctl.cleanse import CleansingService, VerificationRegister
from forgetctl.engine.core import EngineConfig, SearchEngine
from forgetctl.engine.documents import Document, PiiTag

_counter = itertools.count()


def make_doc(body: str = "hello world", subject: str = "subj-a",
             email: str | None = None, ttl: float | None = None,
             extra: dict[str, str] | None = None,
             purpose: str = "unspecified") -> Document:
    n = next(_counter)
    fields = {"body": body, "email": email or f"user{n}@example.com"}
    if extra:
        fields.update(extra)
    tags = {"email": PiiTag(subject_id=subject, ttl_seconds=ttl, purpose=purpose),
            "body": PiiTag(subject_id=subject, ttl_seconds=ttl, purpose=purpose)}
    return Document.create(fields=fields, pii_tags=tags)


@pytest.fixture
def clock() -> SimulatedClock:
    return SimulatedClock(1_700_000_000.0)


@pytest.fixture
def engine(tmp_path: Path, clock: SimulatedClock) -> SearchEngine:
    return SearchEngine(tmp_path / "primary", clock=clock)


@pytest.fixture
def replicated(tmp_path: Path, clock: SimulatedClock) -> SearchEngine:
    replica = SearchEngine(tmp_path / "replica", clock=clock, name="replica")
    return SearchEngine(tmp_path / "primary", clock=clock, replica=replica)


@pytest.fixture
def cleanser(tmp_path: Path, clock: SimulatedClock, engine: SearchEngine) -> CleansingService:
    register = VerificationRegister(tmp_path / "register")
    return CleansingService(engine, register, tmp_path / "receipts", clock)


@pytest.fixture
def replicated_cleanser(tmp_path: Path, clock: SimulatedClock,
                        replicated: SearchEngine) -> CleansingService:
    register = VerificationRegister(tmp_path / "register")
    return CleansingService(replicated, register, tmp_path / "receipts", clock)
