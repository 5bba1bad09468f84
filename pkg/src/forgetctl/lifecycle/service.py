"""Request lifecycle service: intake, acknowledgment, adjudication,
execution, honest completion, and compliance monitoring.

The service wraps the cleansing orchestrator and the policy table behind the
workflow a data subject actually experiences. Two design rules shape it:

- Nothing is ever silently dropped. Requests that cannot be authenticated are
  parked visibly; failed cleansing runs keep their partial receipts; late
  work is reported, not hidden.
- Completion is earned, not declared. A request reaches Completed only after
  the byte-level residue scan comes back empty, and that scan result is
  recorded in the audit trail at completion time.
"""

from __future__ import annotations

import dataclasses
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..cleanse.orchestrator import CleansingService
from ..cleanse.receipts import PropagationReceipt
from ..cleanse.residue import ResidueReport
from ..clock import Clock, days
from ..errors import (
    DisproportionateVerificationConfig,
    MissingExplanation,
    NotFound,
    ResidueDetected,
    StepFailed,
    UnknownSubject,
    VerificationFailed,
    WrongState,
)
from ..policy.config import PolicyConfig
from ..policy.deadlines import DeadlineOutcome, deadline_check
from ..policy.engine import EvaluationContext, evaluate, validate_decision
from ..policy.model import (
    Certainty,
    ExemptionAssertion,
    GroundClaim,
    Outcome,
    PolicyDecision,
)
from ..selectors import Selector
from .audit import AuditTrail
from .requests import (
    RequestState,
    ResponseMessage,
    RTBFRequest,
    TERMINAL_STATES,
    VerificationPolicy,
    level_rank,
)
from .sharing import (
    ExternalRecipient,
    PropagationAction,
    PropagationOutcome,
    classify_recipient,
)


@dataclass(frozen=True)
class SubjectRecord:
    """Identity-directory entry: how the subject registered, and whether the
    requesting party is a natural person at all."""

    credential_level: str = "email"
    natural_person: bool = True


@dataclass(frozen=True)
class ServiceConfig:
    verification: VerificationPolicy = field(default_factory=VerificationPolicy)
    auto_ack: bool = True
    batch_interval: float = days(1)
    audit_retention: float = days(365)
    cleansing_deadline: float = days(30)


class RTBFService:
    def __init__(self, cleanser: CleansingService, clock: Clock, data_dir: Path,
                 policy_config: Optional[PolicyConfig] = None,
                 config: Optional[ServiceConfig] = None,
                 recipients: tuple[ExternalRecipient, ...] = ()) -> None:
        self.config = config or ServiceConfig()
        if not self.config.verification.proportionate:
            raise DisproportionateVerificationConfig(
                f"rights require {self.config.verification.rights_level!r} but "
                f"registration only provides "
                f"{self.config.verification.registration_level!r}")
        self.cleanser = cleanser
        self.engine = cleanser.engine
        self.clock = clock
        self.policy_config = policy_config or PolicyConfig()
        self.audit = AuditTrail(Path(data_dir) / "audit",
                                retention_seconds=self.config.audit_retention)
        self.recipients = tuple(recipients)

        self._requests: dict[str, RTBFRequest] = {}
        self._exemption_records: dict[str, tuple[ExemptionAssertion, ...]] = {}
        self._directory: dict[str, SubjectRecord] = {}
        self._pending_cleansing: dict[str, Selector] = {}
        self._ttl_jobs: dict[str, Selector] = {}
        self._ttl_counter = 0
        self._counter = 0
        self.propagation_jobs: list[dict] = []
        self._propagation_warnings: list[dict] = []
        self._next_batch_at = clock.now() + self.config.batch_interval
        self._map_lock = threading.RLock()
        self._request_locks: dict[str, threading.RLock] = {}

    # ------------------------------------------------------------------
    # identity directory
    # ------------------------------------------------------------------

    def register_subject(self, subject_id: str, credential_level: str = "email",
                         natural_person: bool = True) -> None:
        level_rank(credential_level)
        with self._map_lock:
            self._directory[subject_id] = SubjectRecord(
                credential_level=credential_level, natural_person=natural_person)

    def _lock_for(self, request_id: str) -> threading.RLock:
        with self._map_lock:
            return self._request_locks.setdefault(request_id, threading.RLock())

    # ------------------------------------------------------------------
    # intake
    # ------------------------------------------------------------------

    def submit(self, subject_id: str, selector: Selector,
               grounds: tuple[GroundClaim, ...], credentials: dict) -> str:
        now = self.clock.now()
        with self._map_lock:
            self._counter += 1
            request_id = f"req-{self._counter:06d}"
            request = RTBFRequest(request_id=request_id, subject_id=subject_id,
                                  selector=selector, grounds=tuple(grounds),
                                  received_at=now)
            self._requests[request_id] = request
        self.audit.record(request_id, "submitted", now,
                          {"subject_id": subject_id, "selector": selector.describe(),
                           "grounds": [c.ground.value for c in grounds]})

        record = self._directory.get(subject_id)
        if record is None:
            # Data may exist for a subject the service cannot authenticate
            # (legacy import, scraped source). The request is parked in the
            # open, never dropped.
            has_data = bool(self.cleanser.resolve(Selector.for_subject(subject_id)))
            request.parked_no_source = True
            self.audit.record(request_id, "parked-no-source", now,
                              {"data_found": has_data})
            raise UnknownSubject(
                f"subject {subject_id!r} cannot be authenticated; request "
                f"{request_id} parked for manual identification",
                request_id=request_id)

        required = self.config.verification.rights_level
        supplied = str(credentials.get("level", "none"))
        if level_rank(supplied) < level_rank(required) or \
                level_rank(record.credential_level) < level_rank(required):
            self.audit.record(request_id, "verification-failed", now,
                              {"supplied": supplied, "required": required})
            raise VerificationFailed(
                f"request {request_id}: {required!r} verification required")

        request.advance(RequestState.VERIFIED, now)
        self.audit.record(request_id, "verified", now, {"level": supplied})
        return request_id

    # ------------------------------------------------------------------
    # acknowledgment and review
    # ------------------------------------------------------------------

    def acknowledge(self, request_id: str, now: Optional[float] = None) -> ResponseMessage:
        request = self.get_request(request_id)
        at = self.clock.now() if now is None else now
        with self._lock_for(request_id):
            if request.acknowledged_at is not None:
                return ResponseMessage("acknowledgment",
                                       f"request {request_id} already acknowledged",
                                       request.acknowledged_at)
            request.advance(RequestState.ACKNOWLEDGED, at)
            request.acknowledged_at = at
            self.audit.record(request_id, "acknowledged", at, {})
            message = ResponseMessage(
                "acknowledgment",
                f"request {request_id} received; a decision is due within "
                f"{self.policy_config.deadlines.decide_within / days(1):g} days",
                at)
            request.advance(RequestState.UNDER_REVIEW, at)
            self.audit.record(request_id, "under-review", at, {})
            self._review(request, at)
            return message

    def file_extension_notice(self, request_id: str, reason: str) -> ResponseMessage:
        """Notify the subject the decision window is being extended.

        Only a notice sent inside the original window stops the clock; filing
        one does not itself change the request state.
        """
        request = self.get_request(request_id)
        at = self.clock.now()
        with self._lock_for(request_id):
            if request.state in TERMINAL_STATES:
                raise WrongState(f"{request_id} is already {request.state.value}")
            request.extension_notice_at = at
            message = ResponseMessage(
                "extension-notice",
                f"request {request_id}: the decision window is extended; {reason}",
                at)
            self.audit.record(request_id, "extension-notice", at, {"reason": reason})
            return message

    def exemptions_for(self, request_id: str) -> tuple[ExemptionAssertion, ...]:
        self.get_request(request_id)  # existence check
        return self._exemption_records.get(request_id, ())

    def add_exemption_assertion(self, request_id: str,
                                assertion: ExemptionAssertion) -> None:
        request = self.get_request(request_id)
        with self._lock_for(request_id):
            current = self._exemption_records.get(request_id, ())
            self._exemption_records[request_id] = current + (assertion,)
            self.audit.record(request_id, "exemption-asserted", self.clock.now(),
                              assertion.to_payload())
            if request.state is RequestState.UNDER_REVIEW and not request.escalated:
                self._review(request, self.clock.now())

    def _context_for(self, request: RTBFRequest) -> EvaluationContext:
        record = self._directory.get(request.subject_id) or SubjectRecord()
        categories: set[str] = set()
        for doc_id in self.cleanser.resolve(request.selector):
            stored = self.engine.get_doc(doc_id)
            if stored is not None:
                categories.update(tag.purpose for tag in stored.pii_tags.values())
        return EvaluationContext(
            subject_is_natural_person=record.natural_person,
            asserted_exemptions=self._exemption_records.get(request.request_id, ()),
            data_categories=tuple(sorted(categories)),
            config=self.policy_config,
        )

    def _review(self, request: RTBFRequest, at: float) -> None:
        decision = evaluate(request.grounds, self._context_for(request), now=at)
        if decision.outcome is Outcome.ESCALATE:
            request.escalated = True
            self.audit.record(request.request_id, "escalated", at,
                              {"reason": decision.escalation_reason})
            return
        self.adjudicate(request.request_id, decision, actor="rules")

    # ------------------------------------------------------------------
    # adjudication
    # ------------------------------------------------------------------

    def adjudicate(self, request_id: str, decision: PolicyDecision,
                   actor: str = "rules") -> RequestState:
        request = self.get_request(request_id)
        at = self.clock.now()
        with self._lock_for(request_id):
            if request.state is not RequestState.UNDER_REVIEW:
                raise WrongState(
                    f"{request_id} is {request.state.value}, not under review")
            if request.escalated and actor == "rules":
                raise WrongState(
                    f"{request_id} is escalated; only an officer may decide")
            if decision.outcome is Outcome.ESCALATE:
                request.escalated = True
                self.audit.record(request_id, "escalated", at,
                                  {"reason": decision.escalation_reason,
                                   "actor": actor})
                return request.state

            on_record = self._exemption_records.get(request_id, ())
            if decision.outcome is Outcome.REJECT:
                violations = validate_decision(decision, on_record)
                if violations:
                    raise MissingExplanation(
                        f"decision on {request_id} violates: {', '.join(violations)}")

            decision = dataclasses.replace(decision, decided_by=actor, decided_at=at)
            request.decision = decision
            request.advance(RequestState.DECIDED, at)
            self.audit.record(request_id, "decided", at,
                              {"outcome": decision.outcome.value, "actor": actor,
                               "cited_exemptions": list(decision.cited_exemptions)})

            if decision.outcome is Outcome.HONOR:
                request.advance(RequestState.EXECUTING, at)
                self._pending_cleansing[request_id] = request.selector
                self.audit.record(request_id, "executing", at, {})
            else:
                request.advance(RequestState.REJECTED, at)
                request.response = ResponseMessage("rejection", decision.explanation, at)
                self.audit.record(request_id, "rejected", at,
                                  {"cited_exemptions": list(decision.cited_exemptions),
                                   "failed_grounds": list(decision.failed_grounds)})
            return request.state

    # ------------------------------------------------------------------
    # execution
    # ------------------------------------------------------------------

    def execute_batch(self) -> dict[str, str]:
        """Run one shared cleansing pass over everything waiting for it."""
        with self._map_lock:
            batch = dict(self._pending_cleansing)
            self._pending_cleansing.clear()
            # expired-TTL documents ride along with the approved requests
            while self.engine.cleansing_queue:
                self._ttl_counter += 1
                job_id = f"ttl-{self._ttl_counter:06d}"
                selector = self.engine.cleansing_queue.pop(0)
                self._ttl_jobs[job_id] = selector
                batch[job_id] = selector
        if not batch:
            return {}
        at = self.clock.now()
        try:
            receipts = self.cleanser.cleansing_delete_batch(
                batch, deadline_seconds=self.config.cleansing_deadline)
        except StepFailed as exc:
            receipt_ids = getattr(exc, "receipt_ids", {})
            for rid, receipt_id in receipt_ids.items():
                self._attach_receipt(rid, receipt_id, at, failed=str(exc))
            raise
        out = {}
        for rid, receipt in receipts.items():
            self._attach_receipt(rid, receipt.receipt_id, at)
            out[rid] = receipt.receipt_id
        return out

    def _attach_receipt(self, rid: str, receipt_id: str, at: float,
                        failed: str = "") -> None:
        request = self._requests.get(rid)
        details = {"receipt_id": receipt_id}
        if failed:
            details["failed"] = failed
        if request is not None:
            request.receipt_id = receipt_id
            self.audit.record(rid, "cleansing-run", at, details)
        else:
            self.audit.record(rid, "ttl-cleansing-run", at, details)

    def complete(self, request_id: str) -> ResponseMessage:
        """Issue Completed - only if the receipt is done and the scan is empty."""
        request = self.get_request(request_id)
        at = self.clock.now()
        with self._lock_for(request_id):
            if request.state is not RequestState.EXECUTING:
                raise WrongState(f"{request_id} is {request.state.value}, not executing")
            if request.receipt_id is None:
                raise WrongState(f"{request_id} has no cleansing receipt yet")
            receipt = self.cleanser.receipt_status(request.receipt_id)
            if not receipt.all_done:
                raise WrongState(f"receipt {receipt.receipt_id} is not finished")
            report = self.cleanser.verify_absence(request.selector)
            if not report.clean:
                self.audit.record(request_id, "residue-detected", at,
                                  {"matches": len(report.matches),
                                   "surfaces": sorted({m.surface for m in report.matches})})
                raise ResidueDetected(report.matches)
            request.advance(RequestState.COMPLETED, at)
            request.response = ResponseMessage(
                "completion",
                f"request {request_id}: erasure completed and verified absent",
                at)
            self.audit.record(request_id, "completed", at, {
                "residue_matches": 0,
                "tokens_checked": len(report.tokens_checked),
                "scanned_files": report.scanned_files,
                "scanned_bytes": report.scanned_bytes,
            })
            purged = self.cleanser.purge_verified(receipt.doc_ids)
            self.audit.record(request_id, "register-purged", at, {"entries": purged})
            return request.response

    def retry_cleansing(self, request_id: str) -> str:
        """Fresh cleansing run for a request whose verification found residue."""
        request = self.get_request(request_id)
        if request.state is not RequestState.EXECUTING:
            raise WrongState(f"{request_id} is {request.state.value}, not executing")
        receipt = self.cleanser.cleansing_delete(
            request.selector, deadline_seconds=self.config.cleansing_deadline,
            request_id=request_id)
        request.receipt_id = receipt.receipt_id
        self.audit.record(request_id, "cleansing-retried", self.clock.now(),
                          {"receipt_id": receipt.receipt_id})
        return receipt.receipt_id

    # ------------------------------------------------------------------
    # the scheduler heartbeat
    # ------------------------------------------------------------------

    def tick(self) -> dict:
        """One pass of all time-driven work; returns a small activity summary."""
        now = self.clock.now()
        summary = {"acknowledged": 0, "batches": 0, "completed": 0,
                   "residue_detected": 0, "swept": 0}

        if self.config.auto_ack:
            for request in list(self._requests.values()):
                if request.state is RequestState.VERIFIED:
                    self.acknowledge(request.request_id, now)
                    summary["acknowledged"] += 1

        sweep = self.engine.ttl_sweep()
        summary["swept"] = len(sweep.expired_doc_ids)

        if now >= self._next_batch_at or self._pending_cleansing or \
                self.engine.cleansing_queue:
            if self._pending_cleansing or self.engine.cleansing_queue:
                self.execute_batch()
                summary["batches"] += 1
            self._next_batch_at = now + self.config.batch_interval

        for request in list(self._requests.values()):
            if request.state is not RequestState.EXECUTING or not request.receipt_id:
                continue
            receipt = self.cleanser.receipt_status(request.receipt_id)
            if not receipt.all_done:
                try:
                    self.cleanser.resume(receipt.receipt_id)
                    receipt = self.cleanser.receipt_status(request.receipt_id)
                except StepFailed:
                    continue
            if receipt.all_done:
                # one retry per tick: a persistent fault must not spin
                for attempt in range(2):
                    try:
                        self.complete(request.request_id)
                        summary["completed"] += 1
                        break
                    except ResidueDetected:
                        summary["residue_detected"] += 1
                        if attempt == 0:
                            self.retry_cleansing(request.request_id)

        self._finish_ttl_jobs()
        self.audit.expire(now)
        self.engine.event_log.expire(now)
        if self.engine.replica is not None and self.engine.replica.reachable:
            self.engine.replica.event_log.expire(now)
        return summary

    def _finish_ttl_jobs(self) -> None:
        for job_id, selector in list(self._ttl_jobs.items()):
            report = self.cleanser.verify_absence(selector)
            if report.clean:
                doc_ids = self.cleanser.resolve(selector)
                self.cleanser.purge_verified(doc_ids)
                del self._ttl_jobs[job_id]

    # ------------------------------------------------------------------
    # propagation guard
    # ------------------------------------------------------------------

    def external_share_guard(self, request_id: str,
                             recipients: Optional[tuple[ExternalRecipient, ...]] = None,
                             ) -> list[PropagationOutcome]:
        request = self.get_request(request_id)
        if request.decision is None or request.decision.outcome is not Outcome.HONOR:
            raise WrongState(f"{request_id} has no honored decision to propagate")
        targets = self.recipients if recipients is None else recipients
        at = self.clock.now()
        outcomes = []
        for recipient in targets:
            outcome = classify_recipient(recipient)
            outcomes.append(outcome)
            if outcome.action is PropagationAction.JOB_EMITTED:
                self.propagation_jobs.append({"request_id": request_id,
                                              "recipient": recipient.name,
                                              "queued_at": at})
                self.audit.record(request_id, "propagation-job", at,
                                  {"recipient": recipient.name})
            elif outcome.action is PropagationAction.WARNING_NO_API:
                self._propagation_warnings.append({"request_id": request_id,
                                                   "recipient": recipient.name,
                                                   "raised_at": at})
                self.audit.record(request_id, "propagation-warning", at,
                                  {"recipient": recipient.name})
            else:
                self.audit.record(request_id, "propagation-suppressed", at,
                                  {"recipient": recipient.name})
        return outcomes

    # ------------------------------------------------------------------
    # views
    # ------------------------------------------------------------------

    def get_request(self, request_id: str) -> RTBFRequest:
        request = self._requests.get(request_id)
        if request is None:
            raise NotFound(f"no request {request_id!r}")
        return request

    def list_requests(self, state: Optional[str] = None,
                      sort: Optional[str] = None) -> list[RTBFRequest]:
        requests = list(self._requests.values())
        if state == "escalated":
            requests = [r for r in requests
                        if r.escalated and r.state is RequestState.UNDER_REVIEW]
        elif state == "parked":
            requests = [r for r in requests if r.parked_no_source]
        elif state is not None:
            wanted = RequestState(state)
            requests = [r for r in requests if r.state is wanted]
        if sort == "deadline":
            decide_within = self.policy_config.deadlines.decide_within
            requests.sort(key=lambda r: (r.deadline_at(decide_within), r.request_id))
        else:
            requests.sort(key=lambda r: r.request_id)
        return requests

    def receipt_for(self, request_id: str) -> PropagationReceipt:
        request = self.get_request(request_id)
        if request.receipt_id is None:
            raise NotFound(f"{request_id} has no receipt")
        return self.cleanser.receipt_status(request.receipt_id)

    def residue_for(self, request_id: str) -> ResidueReport:
        request = self.get_request(request_id)
        return self.cleanser.verify_absence(request.selector)

    def violations(self, now: Optional[float] = None) -> list[dict]:
        """Everything currently out of compliance, oldest first."""
        at = self.clock.now() if now is None else now
        found: list[dict] = []
        deadlines = self.policy_config.deadlines
        for request in self._requests.values():
            if request.parked_no_source:
                continue
            verdict = deadline_check(request.received_at, request.acknowledged_at,
                                     at, deadlines, request.extension_notice_at)
            if verdict is DeadlineOutcome.LATE_RESPONSE:
                found.append({"kind": "late-response", "request_id": request.request_id,
                              "detail": "acknowledged after the response window",
                              "raised_at": request.acknowledged_at})
            elif verdict is DeadlineOutcome.NO_RESPONSE:
                found.append({"kind": "no-response", "request_id": request.request_id,
                              "detail": "never acknowledged and the window has passed",
                              "raised_at": request.received_at + deadlines.ack_within})
            if request.decision is not None and \
                    request.decision.outcome is Outcome.HONOR:
                on_record = self._exemption_records.get(request.request_id, ())
                for violation in validate_decision(request.decision, on_record):
                    found.append({"kind": violation, "request_id": request.request_id,
                                  "detail": "decision fails validation",
                                  "raised_at": request.decision.decided_at})
            if request.receipt_id is not None:
                receipt = self.cleanser.receipt_status(request.receipt_id)
                if receipt.all_done and not receipt.deadline_met:
                    found.append({"kind": "cleansing-deadline-exceeded",
                                  "request_id": request.request_id,
                                  "detail": f"receipt {receipt.receipt_id} finished late",
                                  "raised_at": receipt.completed_at})
        for warning in self._propagation_warnings:
            found.append({"kind": "propagate-no-api",
                          "request_id": warning["request_id"],
                          "detail": f"recipient {warning['recipient']} offers no "
                                    "deletion API",
                          "raised_at": warning["raised_at"]})
        found.sort(key=lambda v: (v["raised_at"] or 0.0, v["request_id"]))
        return found
