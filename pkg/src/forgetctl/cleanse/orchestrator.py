"""Cleansing-delete orchestration.

A cleansing delete is a thorough, timed erasure: tombstone the target
documents, then chase their bytes through every surface in a fixed order:

  1. expunge_segments   - rewrite tombstoned segments (content leaves the index)
  2. clear_caches       - caches cannot evict selectively, so clear them
  3. flush_translog     - seal in-memory docs, truncate the recovery log
  4. rewrite_snapshots  - rebuild any snapshot still holding target bytes
  5. cull_logs          - redact target values from event logs

The translog flush runs after the segment expunge so an unflushed target doc
is first purged from the in-memory segment and only then committed (without
it) to disk; flushing first would seal the doc's content into a brand-new
segment file. Each step runs on the primary and then on the replica, and the
receipt is persisted after every transition so progress survives a crash and
failed runs can be resumed.

Deadlines are recorded, not enforced: a run that finishes late completes the
erasure and flags deadline_met=False on the receipt for the compliance
monitor to report.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from ..clock import Clock, days
from ..engine.core import SearchEngine
from ..errors import ReplicaUnreachable, StepFailed
from ..selectors import Selector
from .receipts import CLEANSING_STEPS, PropagationReceipt, ReceiptStore, StepStatus
from .register import VerificationRegister
from .residue import ResidueReport, scan_for_tokens

logger = logging.getLogger(__name__)


class CleansingService:
    def __init__(self, engine: SearchEngine, register: VerificationRegister,
                 receipts_dir: Path, clock: Clock,
                 default_deadline_seconds: float = days(30)) -> None:
        self.engine = engine
        self.register = register
        self.receipts = ReceiptStore(receipts_dir)
        self.clock = clock
        self.default_deadline_seconds = default_deadline_seconds
        if register.record not in engine.index_listeners:
            engine.index_listeners.append(register.record)

    # ------------------------------------------------------------------
    # selector resolution (register-backed, so it works after the engine
    # already forgot the docs)
    # ------------------------------------------------------------------

    def resolve(self, selector: Selector) -> tuple[str, ...]:
        if selector.doc_ids:
            return tuple(sorted(selector.doc_ids))
        if selector.subject_id is not None:
            ids = self.register.docs_for_subject(selector.subject_id)
            ids |= self.engine.subject_docs(selector.subject_id)
            return tuple(sorted(ids))
        hits = self.engine.search(selector.query)  # type: ignore[arg-type]
        return tuple(sorted(doc_id for doc_id, _ in hits))

    def tokens_for(self, doc_ids: tuple[str, ...]) -> set[str]:
        return self.register.tokens_for_docs(doc_ids)

    # ------------------------------------------------------------------
    # the erasure run
    # ------------------------------------------------------------------

    def cleansing_delete(self, selector: Selector,
                         deadline_seconds: Optional[float] = None,
                         request_id: Optional[str] = None) -> PropagationReceipt:
        receipts = self._run_batch({request_id or "adhoc": selector}, deadline_seconds)
        return next(iter(receipts.values()))

    def cleansing_delete_batch(self, selectors: dict[str, Selector],
                               deadline_seconds: Optional[float] = None,
                               ) -> dict[str, PropagationReceipt]:
        """One cleansing run covering several approved requests.

        The five steps execute once over the union of targets; every request
        still gets its own receipt (own id, own selector, shared step log).
        """
        return self._run_batch(dict(selectors), deadline_seconds)

    def _run_batch(self, selectors: dict[str, Selector],
                   deadline_seconds: Optional[float]) -> dict[str, PropagationReceipt]:
        deadline = self.default_deadline_seconds if deadline_seconds is None else deadline_seconds
        started = self.clock.now()
        sides = ["primary"] + (["replica"] if self.engine.replica is not None else [])

        per_request: dict[str, PropagationReceipt] = {}
        union_docs: set[str] = set()
        for request_id, selector in selectors.items():
            doc_ids = self.resolve(selector)
            union_docs.update(doc_ids)
            receipt = PropagationReceipt(
                receipt_id=self.receipts.next_id(),
                selector_text=selector.describe(),
                selector_payload=selector.to_payload(),
                doc_ids=doc_ids,
                deadline_seconds=deadline,
                started_at=started,
            )
            receipt.steps = [StepStatus(step=step, side=side)
                             for step in CLEANSING_STEPS for side in sides]
            per_request[request_id] = receipt
            self.receipts.save(receipt)

        tokens = self.register.tokens_for_docs(union_docs)
        target = Selector.for_docs(*sorted(union_docs)) if union_docs else None

        if target is not None:
            self.engine.mark_delete(target)

        try:
            self._execute_steps(list(per_request.values()), sides,
                                sorted(union_docs), tokens)
        except StepFailed as exc:
            # The partial receipts are already persisted; hand their ids back
            # so the caller can resume instead of losing track of the run.
            exc.receipt_ids = {rid: r.receipt_id for rid, r in per_request.items()}
            raise
        return per_request

    def resume(self, receipt_id: str) -> PropagationReceipt:
        """Re-run every step of a receipt that is not done yet."""
        receipt = self.receipts.load(receipt_id)
        sides = sorted({s.side for s in receipt.steps}, reverse=True)  # primary first
        tokens = self.register.tokens_for_docs(receipt.doc_ids)
        self._execute_steps([receipt], [s for s in ("primary", "replica") if s in sides],
                            list(receipt.doc_ids), tokens)
        return receipt

    def _execute_steps(self, receipts: list[PropagationReceipt], sides: list[str],
                       doc_ids: list[str], tokens: set[str]) -> None:
        request_label = receipts[0].receipt_id if len(receipts) == 1 else \
            "+".join(r.receipt_id for r in receipts)

        def record(step: str, side: str, state: str, detail: str = "") -> None:
            at = self.clock.now()
            for receipt in receipts:
                status = receipt.status_of(step, side)
                status.state = state
                status.finished_at = at if state in ("done", "failed") else None
                status.detail = detail
                self.receipts.save(receipt)

        for step in CLEANSING_STEPS:
            for side in sides:
                already = all(r.status_of(step, side).state == "done" for r in receipts)
                if already:
                    continue
                target_engine = self.engine if side == "primary" else self.engine.replica
                if side == "replica" and (target_engine is None or not target_engine.reachable):
                    if self.engine.config.replication_mode == "strict":
                        record(step, side, "failed", "replica unreachable")
                        raise StepFailed(step, side, "replica unreachable")
                    record(step, side, "pending", "replica unreachable; queued")
                    continue
                try:
                    self._run_step(step, target_engine, doc_ids, tokens, request_label)
                except Exception as exc:  # noqa: BLE001 - receipt must record any failure
                    record(step, side, "failed", str(exc))
                    raise StepFailed(step, side, str(exc)) from exc
                record(step, side, "done")

        finished = self.clock.now()
        for receipt in receipts:
            if receipt.all_done:
                receipt.completed_at = finished
                receipt.deadline_met = (finished - receipt.started_at) <= receipt.deadline_seconds
                if not receipt.deadline_met:
                    logger.warning("cleansing run %s exceeded its deadline", receipt.receipt_id)
                self.receipts.save(receipt)

    def _run_step(self, step: str, engine: SearchEngine, doc_ids: list[str],
                  tokens: set[str], request_label: str) -> None:
        if step == "expunge_segments":
            engine.merge_segments(expunge_deletes=True, _propagate=False)
        elif step == "clear_caches":
            engine.clear_caches("all")
        elif step == "flush_translog":
            engine.flush(_propagate=False)
        elif step == "rewrite_snapshots":
            self._rewrite_snapshots(engine, doc_ids, tokens)
        elif step == "cull_logs":
            engine.event_log.cull(tokens, request_id=request_label)
        else:  # pragma: no cover - step list is closed
            raise ValueError(step)

    def _rewrite_snapshots(self, engine: SearchEngine, doc_ids: list[str],
                           tokens: set[str]) -> None:
        """Rebuild exactly the snapshots whose bytes still hold target tokens."""
        encoded = [t.encode("utf-8") for t in tokens]
        for snapshot in engine.snapshots.list_snapshots():
            dirty = False
            for path in snapshot.data_files():
                if not path.exists():
                    continue
                data = path.read_bytes()
                if any(raw in data for raw in encoded):
                    dirty = True
                    break
            if dirty:
                engine.snapshot_rewrite(snapshot.snapshot_id, Selector.for_docs(*doc_ids))

    # ------------------------------------------------------------------
    # verification
    # ------------------------------------------------------------------

    def verify_absence(self, selector: Selector) -> ResidueReport:
        """Independent byte-scan for any residue of the selector's documents."""
        doc_ids = self.resolve(selector)
        tokens = self.register.tokens_for_docs(doc_ids)
        return scan_for_tokens(self.engine, tokens, selector_text=selector.describe())

    def receipt_status(self, receipt_id: str) -> PropagationReceipt:
        return self.receipts.load(receipt_id)

    def purge_verified(self, doc_ids: tuple[str, ...]) -> int:
        """Forget the register entries after their final verification passed."""
        return self.register.purge(doc_ids)
