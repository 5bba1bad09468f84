#!/usr/bin/env python3
"""Start the request API with a freshly seeded demo store.

Seeds a handful of subjects and walks their erasure requests into a spread
of states: several escalated cases waiting for an officer, a couple already
completed, one rejected on a clear legal-hold, and one parked for an unknown
subject. Useful as a backend while developing a review console.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from forgetctl.cleanse import CleansingService, VerificationRegister  # noqa: E402
from forgetctl.clock import SystemClock  # noqa: E402
from forgetctl.engine.core import SearchEngine  # noqa: E402
from forgetctl.engine.documents import Document, PiiTag  # noqa: E402
from forgetctl.errors import UnknownSubject  # noqa: E402
from forgetctl.lifecycle import RTBFService, ServiceConfig  # noqa: E402
from forgetctl.lifecycle.http import create_app  # noqa: E402
from forgetctl.policy.model import (  # noqa: E402
    Certainty,
    Exemption,
    ExemptionAssertion,
    Ground,
    GroundClaim,
)
from forgetctl.selectors import Selector  # noqa: E402

LINT_CONFIG = (Path(__file__).parent.parent / "src" / "forgetctl" / "precedent"
               / "fixtures" / "configs" / "ap5-trace-logging.yaml")

SUBJECTS = ("amelie", "bogdan", "chiara", "dmitri", "esther", "farid")


def seed(base: Path) -> RTBFService:
    clock = SystemClock()
    engine = SearchEngine(base / "engine", clock=clock)
    register = VerificationRegister(base / "register")
    cleanser = CleansingService(engine, register, base / "receipts", clock)
    svc = RTBFService(cleanser, clock, base / "state",
                      config=ServiceConfig(auto_ack=False))

    for i, name in enumerate(SUBJECTS):
        svc.register_subject(name, "email")
        for j in range(2 + i % 3):
            doc = Document.create(
                fields={"body": f"order history entry {j} for {name}",
                        "email": f"{name}@shop.example"},
                pii_tags={"email": PiiTag(subject_id=name, purpose="orders")})
            engine.index_document(doc)
    engine.flush()

    def submit(name: str) -> str:
        return svc.submit(name, Selector.for_subject(name),
                          (GroundClaim.supported(Ground.CONSENT_WITHDRAWN),),
                          {"level": "email"})

    # escalated: an ambiguous free-expression claim parks these for an officer
    for name in SUBJECTS[:3]:
        rid = submit(name)
        svc.add_exemption_assertion(rid, ExemptionAssertion(
            Exemption.FREEDOM_OF_EXPRESSION, asserted_by="editor",
            rationale="the posts quote a published interview",
            certainty=Certainty.AMBIGUOUS))
        svc.acknowledge(rid)
        print(f"escalated: {rid} ({name})")

    # completed end to end
    for name in SUBJECTS[3:5]:
        rid = submit(name)
        svc.acknowledge(rid)
        svc.execute_batch()
        svc.complete(rid)
        print(f"completed: {rid} ({name})")

    # rejected: a clear statutory retention duty overrides the request
    rid = submit(SUBJECTS[5])
    svc.add_exemption_assertion(rid, ExemptionAssertion(
        Exemption.LEGAL_OBLIGATION_OR_PUBLIC_TASK, asserted_by="finance",
        rationale="invoices under statutory retention",
        certainty=Certainty.CLEAR))
    svc.acknowledge(rid)
    print(f"rejected: {rid} ({SUBJECTS[5]})")

    # parked: nobody by this name in the directory
    try:
        svc.submit("nobody-known", Selector.for_subject("nobody-known"),
                   (GroundClaim.supported(Ground.CONSENT_WITHDRAWN),),
                   {"level": "email"})
    except UnknownSubject as exc:
        print(f"parked: {exc.request_id} (nobody-known)")

    return svc


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8571)
    parser.add_argument("--data-dir", type=Path, default=None,
                        help="store location (default: a temporary directory)")
    parser.add_argument("--no-serve", action="store_true",
                        help="seed, print the request states, and exit")
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        base = args.data_dir if args.data_dir is not None else Path(tmp)
        svc = seed(base)
        if args.no_serve:
            for request in svc.list_requests():
                print(f"{request.request_id}: {request.state.value}")
            return

        import uvicorn

        app = create_app(svc, lint_config=LINT_CONFIG)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
