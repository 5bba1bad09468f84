"""Erasure-request lifecycle: intake, review, execution, honest completion."""

from __future__ import annotations

import random
import re
from pathlib import Path

import pytest
from conftest import make_doc

from forgetctl.clock import SimulatedClock, days
from forgetctl.cleanse import CleansingService, VerificationRegister
from forgetctl.engine.core import SearchEngine
from forgetctl.errors import (
    DisproportionateVerificationConfig,
    MissingExplanation,
    NotFound,
    ResidueDetected,
    UnknownSubject,
    VerificationFailed,
    WrongState,
)
from forgetctl.lifecycle import (
    ExternalRecipient,
    PropagationAction,
    RequestState,
    ResponseMessage,
    RTBFService,
    RESPONSE_KINDS,
    ServiceConfig,
    VerificationPolicy,
)
from forgetctl.policy.config import DeadlinePolicy, PolicyConfig, RetentionRule
from forgetctl.policy.model import (
    Certainty,
    Exemption,
    ExemptionAssertion,
    Ground,
    GroundClaim,
    Outcome,
    PolicyDecision,
)
from forgetctl.selectors import Selector

CONSENT = (GroundClaim.supported(Ground.CONSENT_WITHDRAWN),)

# ordinal per state: history must climb, never fall back
_ORDER = {
    "submitted": 0, "verified": 1, "acknowledged": 2, "under-review": 3,
    "decided": 4, "executing": 5, "rejected": 5, "completed": 6,
}


def build_service(tmp_path: Path, clock: SimulatedClock, *, name: str = "svc",
                  policy_config: PolicyConfig | None = None,
                  config: ServiceConfig | None = None,
                  recipients: tuple[ExternalRecipient, ...] = ()) -> RTBFService:
    base = tmp_path / name
    engine = SearchEngine(base / "engine", clock=clock)
    register = VerificationRegister(base / "register")
    cleanser = CleansingService(engine, register, base / "receipts", clock)
    return RTBFService(cleanser, clock, base / "state", policy_config=policy_config,
                       config=config, recipients=recipients)


def seed_subject(service: RTBFService, subject: str, n_docs: int = 2,
                 **doc_kwargs) -> list[str]:
    service.register_subject(subject, "email")
    ids = []
    for i in range(n_docs):
        # bodies are distinctive per subject so absence scans stay meaningful
        kwargs = dict(doc_kwargs)
        kwargs.setdefault("body", f"profile notes for {subject} item {i}")
        doc = make_doc(subject=subject, **kwargs)
        ids.append(service.engine.index_document(doc))
    service.engine.flush()
    return ids


def submit_consent(service: RTBFService, subject: str) -> str:
    return service.submit(subject, Selector.for_subject(subject), CONSENT,
                          {"level": "email"})


# ---------------------------------------------------------------------------
# happy path
# ---------------------------------------------------------------------------

def test_happy_path_reaches_completed(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    assert svc.get_request(rid).state is RequestState.VERIFIED

    clock.advance(3600)
    svc.tick()
    request = svc.get_request(rid)
    assert request.state is RequestState.COMPLETED
    assert request.decision.outcome is Outcome.HONOR
    assert request.response.kind == "completion"
    assert [s for s, _ in request.state_history] == [
        "verified", "acknowledged", "under-review", "decided", "executing",
        "completed"]
    assert svc.residue_for(rid).clean
    assert svc.receipt_for(rid).all_done


def test_completion_records_empty_residue_in_audit(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    clock.advance(60)
    svc.tick()
    completed = [r for r in svc.audit.records(rid) if r.event == "completed"]
    assert len(completed) == 1
    assert completed[0].details["residue_matches"] == 0
    assert completed[0].details["scanned_files"] > 0


def test_ack_deadline_met_under_auto_scheduler(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    clock.advance(days(2))
    svc.tick()
    request = svc.get_request(rid)
    assert request.acknowledged_at - request.received_at <= days(30)
    assert svc.violations() == []


# ---------------------------------------------------------------------------
# verification and parking
# ---------------------------------------------------------------------------

def test_disproportionate_verification_refused_at_startup(tmp_path, clock):
    with pytest.raises(DisproportionateVerificationConfig):
        build_service(tmp_path, clock, config=ServiceConfig(
            verification=VerificationPolicy(registration_level="email",
                                            rights_level="strong-id")))


def test_insufficient_credentials_rejected(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    seed_subject(svc, "alice")
    with pytest.raises(VerificationFailed):
        svc.submit("alice", Selector.for_subject("alice"), CONSENT,
                   {"level": "none"})
    # the request exists but never advanced
    (request,) = svc.list_requests()
    assert request.state is RequestState.SUBMITTED


def test_unknown_subject_is_parked_not_dropped(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    # data exists for a subject the service cannot authenticate
    doc = make_doc(subject="ghost")
    svc.engine.index_document(doc)
    svc.engine.flush()

    with pytest.raises(UnknownSubject) as info:
        svc.submit("ghost", Selector.for_subject("ghost"), CONSENT,
                   {"level": "email"})
    rid = info.value.request_id
    request = svc.get_request(rid)
    assert request.parked_no_source
    assert request.state is RequestState.SUBMITTED
    assert [r.request_id for r in svc.list_requests(state="parked")] == [rid]

    events = [r.event for r in svc.audit.records(rid)]
    assert "parked-no-source" in events
    # the scheduler leaves parked requests alone
    clock.advance(days(1))
    svc.tick()
    assert svc.get_request(rid).state is RequestState.SUBMITTED


def test_parked_requests_excluded_from_deadline_violations(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    with pytest.raises(UnknownSubject):
        svc.submit("ghost", Selector.for_subject("ghost"), CONSENT, {})
    clock.advance(days(45))
    kinds = {v["kind"] for v in svc.violations()}
    assert "no-response" not in kinds


# ---------------------------------------------------------------------------
# acknowledgment
# ---------------------------------------------------------------------------

def test_double_acknowledge_is_idempotent(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    clock.advance(60)
    first = svc.acknowledge(rid)
    at = svc.get_request(rid).acknowledged_at
    clock.advance(60)
    second = svc.acknowledge(rid)
    assert second.kind == "acknowledgment"
    assert svc.get_request(rid).acknowledged_at == at
    acks = [r for r in svc.audit.records(rid) if r.event == "acknowledged"]
    assert len(acks) == 1


def test_late_and_missing_acks_show_as_violations(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    seed_subject(svc, "bob")
    late = submit_consent(svc, "alice")
    silent = submit_consent(svc, "bob")
    clock.advance(days(31))
    svc.acknowledge(late)
    found = {v["request_id"]: v["kind"] for v in svc.violations()}
    assert found[late] == "late-response"
    assert found[silent] == "no-response"


def test_extension_notice_stops_the_clock(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    clock.advance(days(20))
    notice = svc.file_extension_notice(rid, "complex request volume")
    assert notice.kind == "extension-notice"
    clock.advance(days(25))  # day 45 overall
    svc.acknowledge(rid)
    kinds = {v["kind"] for v in svc.violations() if v["request_id"] == rid}
    assert "late-response" not in kinds and "no-response" not in kinds


# ---------------------------------------------------------------------------
# adjudication
# ---------------------------------------------------------------------------

def escalated_request(svc: RTBFService, subject: str = "alice") -> str:
    """Submit a request that the rules escalate (ambiguous exemption)."""
    rid = submit_consent(svc, subject)
    svc.add_exemption_assertion(rid, ExemptionAssertion(
        Exemption.FREEDOM_OF_EXPRESSION, asserted_by="editor",
        rationale="published interview", certainty=Certainty.AMBIGUOUS))
    clock_now = svc.clock.now()
    svc.acknowledge(rid, clock_now)
    request = svc.get_request(rid)
    assert request.escalated and request.state is RequestState.UNDER_REVIEW
    return rid


def test_rules_cannot_decide_an_escalated_request(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    rid = escalated_request(svc)
    with pytest.raises(WrongState):
        svc.adjudicate(rid, PolicyDecision(outcome=Outcome.HONOR), actor="rules")
    # an officer may
    state = svc.adjudicate(rid, PolicyDecision(outcome=Outcome.HONOR),
                           actor="officer-7")
    assert state is RequestState.EXECUTING
    assert svc.get_request(rid).decision.decided_by == "officer-7"


def test_reject_without_explanation_is_refused(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    rid = escalated_request(svc)
    with pytest.raises(MissingExplanation):
        svc.adjudicate(rid, PolicyDecision(
            outcome=Outcome.REJECT,
            cited_exemptions=(Exemption.FREEDOM_OF_EXPRESSION,)), actor="officer-7")
    assert svc.get_request(rid).state is RequestState.UNDER_REVIEW


def test_reject_without_citation_is_refused(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    rid = escalated_request(svc)
    with pytest.raises(MissingExplanation):
        svc.adjudicate(rid, PolicyDecision(
            outcome=Outcome.REJECT, explanation="we prefer to keep it"),
            actor="officer-7")


def test_rejection_response_carries_explanation_verbatim(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    rid = escalated_request(svc)
    explanation = ("The publisher asserts a freedom-of-expression exemption "
                   "for the published interview; erasure is refused.")
    state = svc.adjudicate(rid, PolicyDecision(
        outcome=Outcome.REJECT, explanation=explanation,
        cited_exemptions=(Exemption.FREEDOM_OF_EXPRESSION,)), actor="officer-7")
    assert state is RequestState.REJECTED
    response = svc.get_request(rid).response
    assert response.kind == "rejection"
    assert response.text == explanation


def test_adjudicate_wrong_state_raises(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    with pytest.raises(WrongState):  # still verified, not under review
        svc.adjudicate(rid, PolicyDecision(outcome=Outcome.HONOR), actor="officer-7")
    clock.advance(60)
    svc.tick()  # runs to completed
    with pytest.raises(WrongState):
        svc.adjudicate(rid, PolicyDecision(outcome=Outcome.HONOR), actor="officer-7")


def test_retention_rule_produces_automatic_rejection(tmp_path, clock):
    policy = PolicyConfig(retention_rules=(
        RetentionRule(category="betting-ledger", statute="Gambling Act s.34",
                      retain_days=1825),))
    svc = build_service(tmp_path, clock, policy_config=policy)
    seed_subject(svc, "alice", purpose="betting-ledger")
    rid = submit_consent(svc, "alice")
    clock.advance(60)
    svc.tick()
    request = svc.get_request(rid)
    assert request.state is RequestState.REJECTED
    assert request.decision.outcome is Outcome.REJECT
    assert "Gambling Act s.34" in request.decision.explanation
    assert Exemption.LEGAL_OBLIGATION_OR_PUBLIC_TASK in request.decision.cited_exemptions


def test_non_natural_person_rejected(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    svc.register_subject("acme-corp", "email", natural_person=False)
    doc = make_doc(subject="acme-corp")
    svc.engine.index_document(doc)
    svc.engine.flush()
    rid = submit_consent(svc, "acme-corp")
    clock.advance(60)
    svc.tick()
    request = svc.get_request(rid)
    assert request.state is RequestState.REJECTED
    assert request.decision.explanation


# ---------------------------------------------------------------------------
# escalation queue
# ---------------------------------------------------------------------------

def test_escalation_queue_sorted_by_time_to_deadline(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    for name in ("alice", "bob", "carol"):
        seed_subject(svc, name)
    rids = []
    for name in ("alice", "bob", "carol"):
        rids.append(escalated_request(svc, name))
        clock.advance(days(3))
    queue = svc.list_requests(state="escalated", sort="deadline")
    # oldest submission has the nearest deadline, so it comes first
    assert [r.request_id for r in queue] == rids
    deadlines = [r.deadline_at(svc.policy_config.deadlines.decide_within)
                 for r in queue]
    assert deadlines == sorted(deadlines)


# ---------------------------------------------------------------------------
# honest completion
# ---------------------------------------------------------------------------

def test_missed_surface_blocks_completion_until_recleansed(tmp_path, clock, monkeypatch):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    svc.engine.snapshot_create()  # holds alice's tokens
    rid = submit_consent(svc, "alice")
    svc.acknowledge(rid)
    assert svc.get_request(rid).state is RequestState.EXECUTING

    # fault: the snapshot rewrite step silently does nothing
    monkeypatch.setattr(CleansingService, "_rewrite_snapshots",
                        lambda self, engine, doc_ids, tokens: None)
    svc.execute_batch()
    assert svc.receipt_for(rid).all_done  # the receipt *claims* success
    with pytest.raises(ResidueDetected):
        svc.complete(rid)
    request = svc.get_request(rid)
    assert request.state is RequestState.EXECUTING
    assert any(r.event == "residue-detected" for r in svc.audit.records(rid))

    # with the fault removed, a retried cleansing run clears the snapshot
    monkeypatch.undo()
    svc.retry_cleansing(rid)
    svc.complete(rid)
    assert svc.get_request(rid).state is RequestState.COMPLETED
    assert svc.residue_for(rid).clean


def test_tick_retries_residue_until_clean(tmp_path, clock, monkeypatch):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    svc.engine.snapshot_create()
    rid = submit_consent(svc, "alice")

    monkeypatch.setattr(CleansingService, "_rewrite_snapshots",
                        lambda self, engine, doc_ids, tokens: None)
    svc.acknowledge(rid)
    summary = svc.tick()
    assert summary["residue_detected"] >= 1
    assert svc.get_request(rid).state is RequestState.EXECUTING

    monkeypatch.undo()
    clock.advance(days(1))
    summary = svc.tick()
    assert summary["completed"] == 1
    assert svc.get_request(rid).state is RequestState.COMPLETED


def test_step_failure_leaves_receipt_resumable_by_tick(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    svc.engine.fail_next_rewrite = True
    svc.engine.snapshot_create()
    clock.advance(60)
    with pytest.raises(Exception):
        svc.tick()
    request = svc.get_request(rid)
    assert request.state is RequestState.EXECUTING
    assert request.receipt_id is not None
    assert not svc.receipt_for(rid).all_done

    clock.advance(days(1))
    svc.tick()  # resumes the receipt, then completes
    assert svc.get_request(rid).state is RequestState.COMPLETED


def test_complete_requires_finished_receipt(tmp_path, clock):
    svc = build_service(tmp_path, clock, config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    svc.acknowledge(rid)
    with pytest.raises(WrongState):  # executing but no cleansing run yet
        svc.complete(rid)


class _TickingClock(SimulatedClock):
    """Every look at the clock costs a second; work can never be instant."""

    def now(self) -> float:
        self.advance(1.0)
        return super().now()


def test_cleansing_deadline_overrun_is_reported(tmp_path):
    clock = _TickingClock(1_700_000_000.0)
    svc = build_service(tmp_path, clock, config=ServiceConfig(
        auto_ack=False, cleansing_deadline=0.0))
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    svc.acknowledge(rid)
    svc.execute_batch()
    svc.complete(rid)
    assert svc.get_request(rid).state is RequestState.COMPLETED
    kinds = {v["kind"] for v in svc.violations()}
    assert "cleansing-deadline-exceeded" in kinds


# ---------------------------------------------------------------------------
# register lifetime
# ---------------------------------------------------------------------------

def test_register_purged_only_after_verified_completion(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    doc_ids = seed_subject(svc, "alice")
    register = svc.cleanser.register
    assert register.tokens_for_docs(doc_ids)
    rid = submit_consent(svc, "alice")
    clock.advance(60)
    svc.tick()
    assert svc.get_request(rid).state is RequestState.COMPLETED
    assert not register.tokens_for_docs(doc_ids)
    events = [r.event for r in svc.audit.records(rid)]
    assert events.index("completed") < events.index("register-purged")


def test_expired_ttl_docs_ride_along_with_batches(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    svc.register_subject("alice", "email")
    doc = make_doc(subject="alice", ttl=days(1))
    doc_id = svc.engine.index_document(doc)
    svc.engine.flush()
    tokens = svc.cleanser.register.tokens_for_docs((doc_id,))
    assert tokens
    clock.advance(days(2))
    svc.tick()
    assert svc.engine.get_doc(doc_id) is None
    report = svc.cleanser.verify_absence(Selector.for_docs(doc_id))
    assert report.clean
    # register entry released once the sweep's cleansing verified out
    assert not svc.cleanser.register.tokens_for_docs((doc_id,))


# ---------------------------------------------------------------------------
# external sharing guard
# ---------------------------------------------------------------------------

RECIPIENTS = (
    ExternalRecipient("partner-with-api", has_deletion_api=True,
                      legal_basis="dpa-2021-04"),
    ExternalRecipient("legacy-feed", has_deletion_api=False,
                      legal_basis="dpa-2019-11"),
    ExternalRecipient("shadow-broker", has_deletion_api=True, legal_basis=""),
)


def test_share_guard_emits_warns_and_suppresses(tmp_path, clock):
    svc = build_service(tmp_path, clock, recipients=RECIPIENTS)
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    clock.advance(60)
    svc.tick()
    outcomes = svc.external_share_guard(rid)
    by_name = {o.recipient: o.action for o in outcomes}
    assert by_name["partner-with-api"] is PropagationAction.JOB_EMITTED
    assert by_name["legacy-feed"] is PropagationAction.WARNING_NO_API
    assert by_name["shadow-broker"] is PropagationAction.SUPPRESSED_NO_LEGAL_BASIS

    assert [j["recipient"] for j in svc.propagation_jobs] == ["partner-with-api"]
    kinds = {v["kind"] for v in svc.violations()}
    assert "propagate-no-api" in kinds
    events = [r.event for r in svc.audit.records(rid)]
    assert "propagation-suppressed" in events


def test_share_guard_requires_an_honored_decision(tmp_path, clock):
    svc = build_service(tmp_path, clock, recipients=RECIPIENTS,
                        config=ServiceConfig(auto_ack=False))
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    with pytest.raises(WrongState):
        svc.external_share_guard(rid)


# ---------------------------------------------------------------------------
# response kinds: there is no redirect
# ---------------------------------------------------------------------------

def test_response_kinds_do_not_include_redirect():
    assert "redirect" not in RESPONSE_KINDS
    assert set(RESPONSE_KINDS) == {
        "acknowledgment", "rejection", "completion", "extension-notice"}


def test_synthetic_redirect_response_is_refused():
    with pytest.raises(ValueError):
        ResponseMessage("redirect", "please ask our partner instead", 0.0)


def test_no_lifecycle_path_emits_a_redirect(tmp_path, clock):
    svc = build_service(tmp_path, clock, recipients=RECIPIENTS,
                        config=ServiceConfig(auto_ack=False))
    for name in ("alice", "bob", "carol"):
        seed_subject(svc, name)
    rng = random.Random(11)
    responses: list[ResponseMessage] = []
    rids = []
    for name in ("alice", "bob", "carol"):
        rid = submit_consent(svc, name)
        rids.append(rid)
        if rng.random() < 0.5:
            svc.add_exemption_assertion(rid, ExemptionAssertion(
                Exemption.LEGAL_CLAIMS, asserted_by="counsel",
                rationale="pending litigation", certainty=Certainty.AMBIGUOUS))
    for rid in rids:
        responses.append(svc.acknowledge(rid))
        responses.append(svc.file_extension_notice(rid, "load"))
        request = svc.get_request(rid)
        if request.escalated:
            svc.adjudicate(rid, PolicyDecision(
                outcome=Outcome.REJECT, explanation="litigation hold",
                cited_exemptions=(Exemption.LEGAL_CLAIMS,)), actor="officer-1")
    clock.advance(days(1))
    svc.tick()
    for rid in rids:
        response = svc.get_request(rid).response
        if response is not None:
            responses.append(response)
    assert responses
    assert all(r.kind in RESPONSE_KINDS for r in responses)
    assert all(r.kind != "redirect" for r in responses)


# ---------------------------------------------------------------------------
# audit minimization
# ---------------------------------------------------------------------------

def test_audit_never_contains_tokens_or_field_values(tmp_path, clock):
    svc = build_service(tmp_path, clock, recipients=RECIPIENTS)
    sentinels = []
    for name in ("alice", "bob"):
        svc.register_subject(name, "email")
        for i in range(3):
            sentinel = f"{name}.pii.{random.Random(i).getrandbits(64):016x}"
            sentinels.append(sentinel)
            doc = make_doc(body=f"note {sentinel}", subject=name,
                           email=f"{name}{i}@secret-mail.example")
            svc.engine.index_document(doc)
    svc.engine.flush()
    for name in ("alice", "bob"):
        submit_consent(svc, name)
    clock.advance(60)
    svc.tick()

    blob = svc.audit.raw_bytes()
    for sentinel in sentinels:
        assert sentinel.encode() not in blob
    assert b"secret-mail.example" not in blob


def test_audit_has_exactly_one_record_per_transition(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    clock.advance(60)
    svc.tick()
    events = [r.event for r in svc.audit.records(rid)]
    for transition in ("submitted", "verified", "acknowledged", "under-review",
                       "decided", "executing", "completed"):
        assert events.count(transition) == 1, transition


def test_audit_trail_expires_by_retention(tmp_path, clock):
    svc = build_service(tmp_path, clock,
                        config=ServiceConfig(audit_retention=days(10)))
    seed_subject(svc, "alice")
    rid = submit_consent(svc, "alice")
    clock.advance(60)
    svc.tick()
    assert list(svc.audit.records(rid))
    clock.advance(days(11))
    svc.tick()
    assert not list(svc.audit.records(rid))


# ---------------------------------------------------------------------------
# randomized interleavings: states only move forward
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_states_climb_monotonically_under_random_interleaving(tmp_path, clock, seed):
    rng = random.Random(seed)
    svc = build_service(tmp_path, clock, name=f"svc-{seed}",
                        config=ServiceConfig(auto_ack=rng.random() < 0.5))
    subjects = [f"subj-{i}" for i in range(4)]
    for name in subjects:
        seed_subject(svc, name, n_docs=1)
    rids: list[str] = []

    def check_all():
        for request in svc.list_requests():
            ranks = [_ORDER[s] for s, _ in request.state_history]
            assert ranks == sorted(ranks)
            assert len(set(s for s, _ in request.state_history)) == len(
                request.state_history)

    for _ in range(60):
        op = rng.randrange(6)
        try:
            if op == 0 and subjects:
                rids.append(submit_consent(svc, rng.choice(subjects)))
            elif op == 1:
                clock.advance(rng.uniform(60, days(2)))
            elif op == 2:
                svc.tick()
            elif op == 3 and rids:
                svc.acknowledge(rng.choice(rids))
            elif op == 4 and rids:
                svc.complete(rng.choice(rids))
            elif op == 5 and rids:
                svc.adjudicate(rng.choice(rids), PolicyDecision(
                    outcome=Outcome.HONOR), actor="officer-1")
        except (WrongState, NotFound):
            pass  # refused ops must not corrupt state
        check_all()


def test_thousand_requests_all_acknowledged_in_time(tmp_path, clock):
    svc = build_service(tmp_path, clock)
    rng = random.Random(99)
    svc.register_subject("bulk", "email")
    doc = make_doc(subject="bulk")
    svc.engine.index_document(doc)
    svc.engine.flush()

    rids = []
    for _ in range(1000):
        rids.append(svc.submit("bulk", Selector.for_subject("bulk"), CONSENT,
                               {"level": "email"}))
        if rng.random() < 0.05:
            clock.advance(rng.uniform(0, days(0.5)))
            svc.tick()
    svc.tick()

    window = svc.policy_config.deadlines.ack_within
    for rid in rids:
        request = svc.get_request(rid)
        assert request.acknowledged_at is not None
        assert request.acknowledged_at - request.received_at <= window
    kinds = {v["kind"] for v in svc.violations()}
    assert "late-response" not in kinds and "no-response" not in kinds
