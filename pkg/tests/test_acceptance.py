"""Acceptance gate: the guarantees this package is shipped against.

Each test here states one end-to-end promise and checks it at full strength:
randomized cleansing thoroughness, exact fixture reproduction, policy
totality, deadline classification, honest completion, linter isolation, and
the cleansing-impact envelope on a large track. Budgeted tests measure their
own wall time; nothing here is mocked except the one deliberately injected
fault.
"""

from __future__ import annotations

import hashlib
import itertools
import random
import time
from pathlib import Path

import pytest

from forgetctl.bench import Challenge, cleansing_impact, generate_track, load_engine
from forgetctl.cleanse import CleansingService, VerificationRegister
from forgetctl.clock import SimulatedClock, days
from forgetctl.engine.core import EngineConfig, SearchEngine
from forgetctl.engine.documents import Document, PiiTag
from forgetctl.engine.queries import Query
from forgetctl.errors import ResidueDetected
from forgetctl.lifecycle import RequestState, RTBFService, ServiceConfig
from forgetctl.policy.deadlines import DeadlineOutcome, deadline_check
from forgetctl.policy.engine import EvaluationContext, evaluate, validate_decision
from forgetctl.policy.model import (
    Certainty,
    Exemption,
    ExemptionAssertion,
    Ground,
    GroundClaim,
    Outcome,
)
from forgetctl.precedent import (
    Category,
    bundled_corpus,
    bundled_year6,
    lint_file,
    match_all,
    summarize,
    tally,
)
from forgetctl.selectors import Selector

CONFIG_DIR = Path(__file__).parent.parent / "src" / "forgetctl" / "precedent" / "fixtures" / "configs"

TRIALS = 100


# ---------------------------------------------------------------------------
# randomized thoroughness suite (shared by the cleansing and replica checks)
# ---------------------------------------------------------------------------

def _trial_doc(i: int) -> tuple[Document, str, str]:
    """One document with values that appear nowhere else in the store."""
    subject = f"person-{i:03d}"
    sentinel = hashlib.blake2b(f"trial:{i}".encode(), digest_size=8).hexdigest()
    fields = {
        "body": f"case notes {sentinel} pending review",
        "email": f"{subject}@trial.example",
        "full_name": f"registrant-{i:03d}-holder",
    }
    tags = {
        "email": PiiTag(subject_id=subject, purpose="support"),
        "full_name": PiiTag(subject_id=subject, purpose="support"),
    }
    return Document.create(fields=fields, pii_tags=tags), subject, sentinel


@pytest.fixture(scope="module")
def thoroughness_run(tmp_path_factory):
    """Drive randomized documents through randomized store histories.

    Every trial indexes one distinctive document, applies a random mix of
    flushes, merges, cache-warming searches, and snapshots, then tombstones
    the document and records what an absence scan still finds. A cleansing
    delete follows, and the scan runs again. The raw observations are
    returned for the assertions to pick over.
    """
    clock = SimulatedClock(1_700_000_000.0)
    base = tmp_path_factory.mktemp("thoroughness")
    replica = SearchEngine(base / "replica", clock=clock, name="replica")
    # small seal count so documents land in sealed segments quickly
    engine = SearchEngine(
        base / "engine", clock=clock, replica=replica,
        config=EngineConfig(seal_doc_count=8, log_level="trace"))
    register = VerificationRegister(base / "register")
    cleanser = CleansingService(engine, register, base / "receipts", clock)

    rng = random.Random(20260816)
    results = []
    started = time.monotonic()
    for i in range(TRIALS):
        doc, subject, sentinel = _trial_doc(i)
        doc_id = engine.index_document(doc)

        # a random slice of store life between ingestion and deletion
        for _ in range(rng.randint(1, 4)):
            op = rng.choices(
                ("search", "flush", "merge", "snapshot", "idle"),
                weights=(40, 25, 15, 8, 12))[0]
            if op == "search":
                engine.search(Query.boolean_and((sentinel, "notes"), field="body"))
            elif op == "flush":
                engine.flush()
            elif op == "merge":
                engine.merge_segments()
            elif op == "snapshot":
                engine.snapshot_create()
            clock.advance(rng.uniform(1.0, 300.0))

        selector = Selector.for_docs(doc_id)
        engine.mark_delete(selector)
        pre = cleanser.verify_absence(selector)

        receipt = cleanser.cleansing_delete(selector)
        post = cleanser.verify_absence(selector)
        results.append({
            "doc_id": doc_id,
            "subject": subject,
            "pre_surfaces": {m.surface for m in pre.matches},
            "post_matches": tuple(post.matches),
            "all_done": receipt.all_done,
        })
    elapsed = time.monotonic() - started
    return {"results": results, "elapsed": elapsed}


def test_plain_deletes_leave_residue_and_cleansing_removes_it(thoroughness_run):
    results = thoroughness_run["results"]
    assert len(results) == TRIALS

    # a tombstone alone never removes the bytes from the persisted surfaces
    trials_with_residue = sum(1 for r in results if r["pre_surfaces"])
    assert trials_with_residue == TRIALS

    # cleansing leaves nothing behind, in every single trial
    clean = sum(1 for r in results if not r["post_matches"])
    assert clean == TRIALS, [r for r in results if r["post_matches"]][:3]
    assert all(r["all_done"] for r in results)

    # the random histories exercised every surface the scanner knows
    families = {s for r in results for s in r["pre_surfaces"]}
    primary = {s.split("/", 1)[1] for s in families if s.startswith("primary/")}
    assert {"segments", "translog", "cache", "snapshots", "logs"} <= primary
    assert any(s.startswith("replica/") for s in families)

    assert thoroughness_run["elapsed"] < 120.0


def test_replica_holds_no_residue_after_cleansing(thoroughness_run):
    results = thoroughness_run["results"]
    # before cleansing, the replica demonstrably held copies
    assert any(
        s.startswith("replica/") for r in results for s in r["pre_surfaces"])
    on_replica = [
        r["doc_id"] for r in results
        if any(m.surface.startswith("replica/") for m in r["post_matches"])]
    assert on_replica == [], f"replica residue for {on_replica[:5]}"


# ---------------------------------------------------------------------------
# bundled enforcement corpus
# ---------------------------------------------------------------------------

def test_new_cases_split_into_strong_and_weak_matches():
    corpus = bundled_corpus()
    new_cases = bundled_year6()
    started = time.perf_counter()
    counts = tally(match_all(new_cases, corpus))
    elapsed = time.perf_counter() - started
    assert counts == {"strong": 32, "weak": 8, "no-match": 0}
    assert counts["strong"] / len(new_cases) == 0.80
    assert elapsed < 1.0


def test_corpus_summary_reproduces_the_recorded_counts():
    summary = summarize(bundled_corpus())
    assert summary.category_counts == {
        Category.NO_RESPONSE: 54,
        Category.EXMPT_GDPR: 41,
        Category.LATE_RESPONSE: 25,
        Category.EXMPT_OTH: 24,
        Category.OMIT: 17,
        Category.NO_API: 15,
        Category.EXMPT_ALL: 13,
        Category.UI_TROUBLE: 8,
        Category.VERIFY_MORE: 8,
        Category.EXPLAIN: 8,
        Category.PROPAGATE: 5,
        Category.BAD_SERV: 5,
        Category.DEFLECT: 3,
        Category.DBMS: 3,
        Category.NO_SRC: 2,
    }
    assert summary.uncategorized == 5


# ---------------------------------------------------------------------------
# policy engine
# ---------------------------------------------------------------------------

def _policy_space():
    grounds = list(Ground)
    exemptions = list(Exemption)
    for ground_bits in itertools.product((False, True), repeat=len(grounds)):
        claims = tuple(GroundClaim.supported(g)
                       for g, bit in zip(grounds, ground_bits) if bit)
        for states in itertools.product(
                (None, Certainty.CLEAR, Certainty.AMBIGUOUS),
                repeat=len(exemptions)):
            asserted = tuple(
                ExemptionAssertion(exemption=e, asserted_by="acceptance",
                                   rationale="enumerated", certainty=c)
                for e, c in zip(exemptions, states) if c is not None)
            yield claims, EvaluationContext(asserted_exemptions=asserted)


def test_every_claim_and_exemption_combination_gets_a_decision():
    started = time.perf_counter()
    count = 0
    for claims, context in _policy_space():
        decision = evaluate(claims, context)
        count += 1
        if decision.outcome is Outcome.REJECT:
            assert decision.explanation.strip(), (claims, context)
        asserted = context.asserted_exemptions
        ambiguous_only = asserted and all(
            a.certainty is Certainty.AMBIGUOUS for a in asserted)
        if claims and ambiguous_only:
            # uncertain exemptions go to a human, they never auto-reject
            assert decision.outcome is not Outcome.REJECT, (claims, context)
        assert validate_decision(decision, asserted) == []
    elapsed = time.perf_counter() - started
    assert count == (2 ** len(Ground)) * (3 ** len(Exemption))
    assert elapsed < 10.0


def test_acknowledgment_deadline_classification():
    received = 1_000_000.0
    # acknowledged on day 29: inside the window
    assert deadline_check(received, received + days(29),
                          now=received + days(29)) is DeadlineOutcome.OK
    # acknowledged on day 31: answered, but late
    assert deadline_check(received, received + days(31),
                          now=received + days(31)) is DeadlineOutcome.LATE_RESPONSE
    # never acknowledged, observed after the window: silence
    assert deadline_check(received, None,
                          now=received + days(31)) is DeadlineOutcome.NO_RESPONSE
    assert deadline_check(received, None,
                          now=received + days(400)) is DeadlineOutcome.NO_RESPONSE


# ---------------------------------------------------------------------------
# honest completion
# ---------------------------------------------------------------------------

def test_completion_is_blocked_whenever_a_surface_is_missed(tmp_path, monkeypatch):
    clock = SimulatedClock(1_700_000_000.0)
    engine = SearchEngine(tmp_path / "engine", clock=clock)
    register = VerificationRegister(tmp_path / "register")
    cleanser = CleansingService(engine, register, tmp_path / "receipts", clock)
    svc = RTBFService(cleanser, clock, tmp_path / "state",
                      config=ServiceConfig(auto_ack=False))

    def seed_and_submit(name: str) -> str:
        svc.register_subject(name, "email")
        doc = Document.create(
            fields={"body": f"records kept about {name}", "email": f"{name}@x.example"},
            pii_tags={"email": PiiTag(subject_id=name, purpose="support")})
        svc.engine.index_document(doc)
        svc.engine.flush()
        svc.engine.snapshot_create()  # the surface the fault will skip
        rid = svc.submit(name, Selector.for_subject(name),
                         (GroundClaim.supported(Ground.CONSENT_WITHDRAWN),),
                         {"level": "email"})
        svc.acknowledge(rid)
        return rid

    # fault: the snapshot rewrite silently does nothing
    monkeypatch.setattr(CleansingService, "_rewrite_snapshots",
                        lambda self, engine, doc_ids, tokens: None)
    blocked = 0
    for i in range(10):
        rid = seed_and_submit(f"faulted-{i}")
        svc.execute_batch()
        assert svc.receipt_for(rid).all_done  # the receipt alone would lie
        with pytest.raises(ResidueDetected):
            svc.complete(rid)
        assert svc.get_request(rid).state is RequestState.EXECUTING
        blocked += 1
        clock.advance(60.0)
    assert blocked == 10

    # without the fault, completion always carries an empty residue report
    monkeypatch.undo()
    for i in range(5):
        rid = seed_and_submit(f"honest-{i}")
        svc.execute_batch()
        svc.complete(rid)
        assert svc.get_request(rid).state is RequestState.COMPLETED
        report = svc.residue_for(rid)
        assert report.clean and report.scanned_files > 0
        completed = [r for r in svc.audit.records(rid) if r.event == "completed"]
        assert completed and completed[0].details["residue_matches"] == 0
        clock.advance(60.0)


# ---------------------------------------------------------------------------
# configuration linter
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name, pattern", [
    ("ap1-pii-primary-key.yaml", 1),
    ("ap2-anonymize-in-place.yaml", 2),
    ("ap3-untagged-pii.yaml", 3),
    ("ap4-shallow-delete.yaml", 4),
    ("ap5-trace-logging.yaml", 5),
    ("ap6-excessive-verification.yaml", 6),
])
def test_each_fault_config_triggers_exactly_its_own_pattern(name, pattern):
    findings = lint_file(CONFIG_DIR / name)
    assert [f.pattern_id for f in findings] == [pattern]


def test_clean_config_lints_silently():
    assert lint_file(CONFIG_DIR / "clean.yaml") == []


# ---------------------------------------------------------------------------
# cleansing impact on a large live store
# ---------------------------------------------------------------------------

def test_cleansing_impact_stays_inside_the_envelope(tmp_path):
    started = time.monotonic()
    track = generate_track(100_000, seed=7)
    engine, cleanser = load_engine(track, tmp_path)

    report = cleansing_impact(
        engine, cleanser, track, Challenge("high-low", warmup=200),
        mode="batch-1k", workers=2,
        baseline_s=5.0, post_event_s=15.0, min_duration_s=25.0)
    elapsed = time.monotonic() - started

    summary = report.summary
    # the batch removes one percent of the corpus
    assert summary["docs_deleted"] == 1000
    assert summary["receipt_all_done"]
    assert summary["residue_clean"], summary.get("residue_matches")
    # the cache clear and write barrier dent throughput visibly...
    assert summary["trough_ratio"] <= 0.80, summary
    # ...but service recovers to within a tenth of baseline quickly
    assert summary["recovery_s"] is not None and summary["recovery_s"] <= 10.0, summary
    # and the run as a whole keeps most of its baseline rate
    assert summary["mean_ratio"] >= 0.80, summary
    assert any(e.name == "cache-clear" for e in report.events)
    assert any(e.name == "forcemerge" for e in report.events)
    assert any(e.name == "flush" for e in report.events)

    assert elapsed < 300.0
