"""HTTP surface for the erasure-request service.

Thin layer: every route delegates to :class:`RTBFService` and translates its
exceptions into status codes. Error payloads carry a ``detail`` string and,
where one exists, the ``request_id`` so a client can keep tracking a parked
request. No document field values ever appear in a response body.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..errors import (
    MissingExplanation,
    NotFound,
    StoreError,
    UnknownSubject,
    VerificationFailed,
    WrongState,
)
from ..policy.model import Ground, GroundClaim, Outcome, PolicyDecision
from ..selectors import parse_selector
from .requests import RequestState
from .service import RTBFService


class GroundClaimBody(BaseModel):
    ground: str
    facts: dict = Field(default_factory=dict)


class SubmitBody(BaseModel):
    subject_id: str
    selector: str
    grounds: list[GroundClaimBody] = Field(default_factory=list)
    credentials: dict = Field(default_factory=dict)


class DecisionBody(BaseModel):
    outcome: str
    explanation: str = ""
    cited_exemptions: list[str] = Field(default_factory=list)
    failed_grounds: list[str] = Field(default_factory=list)
    escalation_reason: str = ""
    actor: str = "console"


def _request_view(service: RTBFService, request) -> dict:
    payload = request.to_payload()
    payload["deadline_at"] = request.deadline_at(
        service.policy_config.deadlines.decide_within)
    payload["asserted_exemptions"] = [
        a.to_payload() for a in service.exemptions_for(request.request_id)]
    return payload


def create_app(service: RTBFService,
               lint_config: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="forgetctl", docs_url=None, redoc_url=None)

    @app.exception_handler(StoreError)
    async def _store_error(request, exc: StoreError):
        status = 500
        body = {"detail": str(exc)}
        if isinstance(exc, NotFound):
            status = 404
        elif isinstance(exc, WrongState):
            status = 409
        elif isinstance(exc, MissingExplanation):
            status = 422
        elif isinstance(exc, VerificationFailed):
            status = 403
        elif isinstance(exc, UnknownSubject):
            # accepted but parked: the caller gets the id to follow up with
            status = 202
            body["request_id"] = exc.request_id
            body["parked"] = True
        return JSONResponse(status_code=status, content=body)

    @app.post("/requests", status_code=201)
    def submit(body: SubmitBody):
        try:
            selector = parse_selector(body.selector)
            grounds = tuple(GroundClaim(Ground(c.ground), dict(c.facts))
                            for c in body.grounds)
        except ValueError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        request_id = service.submit(body.subject_id, selector, grounds,
                                    body.credentials)
        return _request_view(service, service.get_request(request_id))

    @app.get("/requests/{request_id}")
    def get_request(request_id: str):
        return _request_view(service, service.get_request(request_id))

    @app.get("/requests")
    def list_requests(state: Optional[str] = None, sort: Optional[str] = None):
        if state is not None and state not in ("escalated", "parked") and \
                state not in {s.value for s in RequestState}:
            return JSONResponse(status_code=422,
                                content={"detail": f"unknown state {state!r}"})
        requests = service.list_requests(state=state, sort=sort)
        return {
            "server_time": service.clock.now(),
            "requests": [_request_view(service, r) for r in requests],
        }

    @app.post("/requests/{request_id}/decision")
    def decide(request_id: str, body: DecisionBody):
        try:
            outcome = Outcome(body.outcome)
        except ValueError:
            return JSONResponse(status_code=422,
                                content={"detail": f"unknown outcome {body.outcome!r}"})
        decision = PolicyDecision(
            outcome=outcome,
            explanation=body.explanation,
            cited_exemptions=tuple(body.cited_exemptions),
            failed_grounds=tuple(body.failed_grounds),
            escalation_reason=body.escalation_reason,
        )
        state = service.adjudicate(request_id, decision, actor=body.actor)
        return {"request_id": request_id, "state": state.value}

    @app.get("/requests/{request_id}/receipt")
    def receipt(request_id: str):
        return service.receipt_for(request_id).to_payload()

    @app.get("/requests/{request_id}/residue")
    def residue(request_id: str):
        return service.residue_for(request_id).to_payload()

    @app.get("/compliance/violations")
    def violations():
        return {"server_time": service.clock.now(),
                "violations": service.violations()}

    @app.get("/lint")
    def lint():
        if lint_config is None:
            return {"config": None, "findings": []}
        from ..precedent.linter import lint_file

        findings = lint_file(lint_config)
        return {"config": str(lint_config),
                "findings": [f.to_payload() for f in findings]}

    return app
