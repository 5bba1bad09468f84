from __future__ import annotations

import pytest

from forgetctl.clock import days
from forgetctl.cleanse import CleansingService, VerificationRegister
from forgetctl.cleanse.receipts import CLEANSING_STEPS, PropagationReceipt, ReceiptStore
from forgetctl.cleanse.residue import scan_for_tokens
from forgetctl.engine.core import EngineConfig, SearchEngine
from forgetctl.engine.queries import Query
from forgetctl.errors import NotFound, StepFailed
from forgetctl.selectors import Selector, parse_selector

from conftest import make_doc


def seed_subject(engine, subject="subj-erase", n=4, sentinel_base="deadbeefcafe"):
    ids = []
    for i in range(n):
        doc = make_doc(body=f"personal note {i} {sentinel_base}{i:04x}",
                       subject=subject,
                       email=f"{subject}.{i}@example.com")
        ids.append(engine.index_document(doc))
    return ids


# ---- selectors ----

def test_parse_selector_forms():
    assert parse_selector("docs=d1,d2").doc_ids == ("d1", "d2")
    assert parse_selector("subject=s1").subject_id == "s1"
    assert parse_selector("s1").subject_id == "s1"


def test_selector_exactly_one_form():
    with pytest.raises(ValueError):
        Selector(doc_ids=("d1",), subject_id="s1", query=None)
    with pytest.raises(ValueError):
        Selector(doc_ids=(), subject_id=None, query=None)


# ---- register ----

def test_register_records_via_listener_and_encrypts(tmp_path, clock, engine):
    register = VerificationRegister(tmp_path / "register")
    CleansingService(engine, register, tmp_path / "receipts", clock)
    ids = seed_subject(engine)
    assert register.docs_for_subject("subj-erase") == set(ids)
    tokens = register.tokens_for_docs(ids)
    assert any("deadbeefcafe" in t for t in tokens)
    # at rest the register must not leak its contents
    blob = (tmp_path / "register" / "register.bin").read_bytes()
    assert b"deadbeefcafe0000" not in blob
    assert b"subj-erase" not in blob


def test_register_survives_reopen_and_purge(tmp_path, clock, engine):
    register = VerificationRegister(tmp_path / "register")
    CleansingService(engine, register, tmp_path / "receipts", clock)
    ids = seed_subject(engine, n=3)
    reopened = VerificationRegister(tmp_path / "register")
    assert reopened.docs_for_subject("subj-erase") == set(ids)
    purged = reopened.purge(ids)
    assert purged == 3
    assert not reopened.has_subject("subj-erase")
    third = VerificationRegister(tmp_path / "register")
    assert not third.has_subject("subj-erase")


# ---- the cleansing run ----

def test_cleansing_delete_runs_all_steps_in_order(cleanser, engine):
    seed_subject(engine)
    receipt = cleanser.cleansing_delete(Selector.for_subject("subj-erase"))
    assert receipt.all_done
    assert receipt.deadline_met
    assert [s.step for s in receipt.steps] == list(CLEANSING_STEPS)
    finished = [s.finished_at for s in receipt.steps]
    assert finished == sorted(finished)


def test_cleansing_leaves_no_residue_anywhere(cleanser, engine):
    seed_subject(engine)
    seed_subject(engine, subject="subj-keep", sentinel_base="feedfacefeed")
    engine.flush()
    engine.snapshot_create()
    selector = Selector.for_subject("subj-erase")
    assert not cleanser.verify_absence(selector).clean
    cleanser.cleansing_delete(selector)
    report = cleanser.verify_absence(selector)
    assert report.clean, [m.to_payload() for m in report.matches]
    # the other subject's data is untouched
    assert not cleanser.verify_absence(Selector.for_subject("subj-keep")).clean
    assert engine.subject_docs("subj-keep")


def test_verify_absence_scans_bytes_not_engine_state(cleanser, engine, tmp_path):
    ids = seed_subject(engine, n=1)
    engine.flush()
    cleanser.cleansing_delete(Selector.for_docs(*ids))
    assert cleanser.verify_absence(Selector.for_docs(*ids)).clean
    # plant a stray copy on a scanned surface behind the engine's back
    stray = engine.segments_dir / "seg-999999.seg"
    stray.write_text('{"smuggled": "deadbeefcafe0000"}')
    report = cleanser.verify_absence(Selector.for_docs(*ids))
    assert not report.clean
    assert any(m.location.endswith("seg-999999.seg") for m in report.matches)


def test_unflushed_doc_is_cleansed_from_translog(cleanser, engine):
    ids = seed_subject(engine, n=2)
    assert engine.translog.entry_count == 2  # nothing flushed yet
    cleanser.cleansing_delete(Selector.for_docs(*ids))
    assert engine.translog.entry_count == 0
    assert cleanser.verify_absence(Selector.for_docs(*ids)).clean


def test_cleansing_rewrites_only_contaminated_snapshots(cleanser, engine):
    clean_ids = seed_subject(engine, subject="subj-other", sentinel_base="aaaabbbbcccc")
    engine.flush()
    snap_clean = engine.snapshot_create()
    target_ids = seed_subject(engine, n=2)
    engine.flush()
    snap_dirty = engine.snapshot_create()
    cleanser.cleansing_delete(Selector.for_subject("subj-erase"))
    remaining = {s.snapshot_id for s in engine.snapshots.list_snapshots()}
    assert snap_clean.snapshot_id in remaining, "uncontaminated snapshot must not be touched"
    assert snap_dirty.snapshot_id not in remaining, "contaminated snapshot must be replaced"
    assert cleanser.verify_absence(Selector.for_docs(*target_ids)).clean


def test_cleansing_culls_trace_logs(tmp_path, clock):
    engine = SearchEngine(tmp_path / "traced", clock=clock,
                          config=EngineConfig(log_level="trace"))
    register = VerificationRegister(tmp_path / "register")
    svc = CleansingService(engine, register, tmp_path / "receipts", clock)
    ids = seed_subject(engine, n=1)
    email = engine.get_doc(ids[0]).fields["email"]
    logged = "".join(p.read_text() for p in engine.event_log.files())
    assert email in logged
    svc.cleansing_delete(Selector.for_docs(*ids))
    culled = "".join(p.read_text() for p in engine.event_log.files())
    assert email not in culled
    assert "[REDACTED:" in culled


def test_cleansed_subject_remains_addressable_after_engine_forgets(cleanser, engine):
    ids = seed_subject(engine)
    cleanser.cleansing_delete(Selector.for_subject("subj-erase"))
    assert engine.subject_docs("subj-erase") == set()
    # the register still resolves the subject for re-verification
    assert cleanser.resolve(Selector.for_subject("subj-erase")) == tuple(sorted(ids))
    assert cleanser.verify_absence(Selector.for_subject("subj-erase")).clean


def test_register_purge_ends_addressability(cleanser, engine):
    ids = seed_subject(engine)
    cleanser.cleansing_delete(Selector.for_subject("subj-erase"))
    cleanser.purge_verified(tuple(ids))
    assert cleanser.resolve(Selector.for_subject("subj-erase")) == ()
    report = cleanser.verify_absence(Selector.for_subject("subj-erase"))
    assert report.clean
    assert report.tokens_checked == ()


# ---- receipts, failure, resume ----

def test_failed_snapshot_rewrite_preserves_partial_receipt(cleanser, engine):
    seed_subject(engine)
    engine.flush()
    engine.snapshot_create()
    engine.fail_next_rewrite = True
    with pytest.raises(StepFailed):
        cleanser.cleansing_delete(Selector.for_subject("subj-erase"))
    receipt = cleanser.receipt_status(cleanser.receipts.list_ids()[0])
    states = {s.step: s.state for s in receipt.steps}
    assert states["expunge_segments"] == "done"
    assert states["rewrite_snapshots"] == "failed"
    assert states["cull_logs"] == "pending"
    assert not receipt.all_done
    assert receipt.completed_at is None
    # the old snapshot is intact: no torn half-rewritten state
    assert len(engine.snapshots.list_snapshots()) == 1


def test_resume_completes_partial_run_without_redoing_done_steps(cleanser, engine, clock):
    seed_subject(engine)
    engine.flush()
    engine.snapshot_create()
    engine.fail_next_rewrite = True
    with pytest.raises(StepFailed):
        cleanser.cleansing_delete(Selector.for_subject("subj-erase"))
    receipt_id = cleanser.receipts.list_ids()[0]
    done_before = {
        (s.step, s.side): s.finished_at
        for s in cleanser.receipt_status(receipt_id).steps if s.state == "done"
    }
    clock.advance(60.0)
    resumed = cleanser.resume(receipt_id)
    assert resumed.all_done
    assert resumed.deadline_met
    for key, finished_at in done_before.items():
        step, side = key
        assert resumed.status_of(step, side).finished_at == finished_at, \
            "completed steps must not be re-executed on resume"
    assert cleanser.verify_absence(Selector.for_subject("subj-erase")).clean


def test_deadline_overrun_recorded_not_rolled_back(cleanser, engine, clock):
    ids = seed_subject(engine)
    slow_clock_step = days(40)

    original = engine.clear_caches

    def slow_clear(kind="all"):
        clock.advance(slow_clock_step)
        return original(kind)

    engine.clear_caches = slow_clear
    receipt = cleanser.cleansing_delete(Selector.for_docs(*ids), deadline_seconds=days(30))
    assert receipt.all_done, "late completion still completes"
    assert not receipt.deadline_met
    assert cleanser.verify_absence(Selector.for_docs(*ids)).clean


def test_batch_run_shares_steps_and_issues_per_request_receipts(cleanser, engine):
    a_ids = seed_subject(engine, subject="subj-a", sentinel_base="aaaa111122223333"[:12])
    b_ids = seed_subject(engine, subject="subj-b", sentinel_base="bbbb111122223333"[:12])
    receipts = cleanser.cleansing_delete_batch({
        "req-a": Selector.for_subject("subj-a"),
        "req-b": Selector.for_subject("subj-b"),
    })
    assert set(receipts) == {"req-a", "req-b"}
    ra, rb = receipts["req-a"], receipts["req-b"]
    assert ra.receipt_id != rb.receipt_id
    assert ra.doc_ids == tuple(sorted(a_ids))
    assert rb.doc_ids == tuple(sorted(b_ids))
    # one shared run: step timestamps coincide
    assert [s.finished_at for s in ra.steps] == [s.finished_at for s in rb.steps]
    assert cleanser.verify_absence(Selector.for_subject("subj-a")).clean
    assert cleanser.verify_absence(Selector.for_subject("subj-b")).clean


def test_receipt_store_round_trip_and_missing_id(tmp_path, cleanser, engine):
    ids = seed_subject(engine, n=1)
    receipt = cleanser.cleansing_delete(Selector.for_docs(*ids))
    loaded = cleanser.receipt_status(receipt.receipt_id)
    assert loaded.to_payload() == receipt.to_payload()
    with pytest.raises(NotFound):
        cleanser.receipt_status("rcpt-404404")


# ---- replicated cleansing ----

def test_cleansing_covers_replica_surfaces(replicated_cleanser, replicated):
    engine = replicated
    ids = seed_subject(engine)
    engine.flush()
    selector = Selector.for_docs(*ids)
    pre = replicated_cleanser.verify_absence(selector)
    assert any(m.surface.startswith("replica/") for m in pre.matches), \
        "replica must be part of the scanned residue surface"
    receipt = replicated_cleanser.cleansing_delete(selector)
    sides = {s.side for s in receipt.steps}
    assert sides == {"primary", "replica"}
    assert receipt.all_done
    post = replicated_cleanser.verify_absence(selector)
    assert post.clean, [m.to_payload() for m in post.matches]


def test_queued_replica_outage_leaves_replica_steps_pending(tmp_path, clock):
    replica = SearchEngine(tmp_path / "replica", clock=clock, name="replica")
    primary = SearchEngine(tmp_path / "primary", clock=clock,
                           config=EngineConfig(replication_mode="queued"),
                           replica=replica)
    register = VerificationRegister(tmp_path / "register")
    svc = CleansingService(primary, register, tmp_path / "receipts", clock)
    ids = seed_subject(primary)
    replica.reachable = False
    receipt = svc.cleansing_delete(Selector.for_docs(*ids))
    assert not receipt.all_done
    for step in CLEANSING_STEPS:
        assert receipt.status_of(step, "primary").state == "done"
        assert receipt.status_of(step, "replica").state == "pending"
        assert "unreachable" in receipt.status_of(step, "replica").detail
    # outage over: drain the data ops, then resume the receipt
    replica.reachable = True
    primary.drain_replica_queue()
    resumed = svc.resume(receipt.receipt_id)
    assert resumed.all_done
    assert svc.verify_absence(Selector.for_docs(*ids)).clean


def test_scan_for_tokens_reports_every_surface(tmp_path, clock):
    engine = SearchEngine(tmp_path / "scan", clock=clock,
                          config=EngineConfig(log_level="trace"))
    register = VerificationRegister(tmp_path / "register")
    CleansingService(engine, register, tmp_path / "receipts", clock)
    ids = seed_subject(engine, n=2)
    engine.search(Query.prefix_of("personal", field="body"))  # populate caches
    engine.flush()
    engine.snapshot_create()
    # translog empty after flush; index two more so it has content again
    seed_subject(engine, n=1)
    tokens = register.tokens_for_docs(register.known_doc_ids())
    report = scan_for_tokens(engine, tokens)
    surfaces = {m.surface for m in report.matches}
    assert f"{engine.name}/segments" in surfaces
    assert f"{engine.name}/translog" in surfaces
    assert f"{engine.name}/snapshots" in surfaces
    assert f"{engine.name}/logs" in surfaces
    assert f"{engine.name}/cache" in surfaces
