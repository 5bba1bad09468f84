"""Erasure-request state and verification types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..errors import WrongState
from ..policy.model import GroundClaim, PolicyDecision
from ..selectors import Selector


class RequestState(str, Enum):
    SUBMITTED = "submitted"
    VERIFIED = "verified"
    ACKNOWLEDGED = "acknowledged"
    UNDER_REVIEW = "under-review"
    DECIDED = "decided"
    EXECUTING = "executing"
    COMPLETED = "completed"
    REJECTED = "rejected"


# The only permitted moves. A request can never travel backward and can only
# leave DECIDED toward execution or rejection.
_TRANSITIONS: dict[RequestState, frozenset[RequestState]] = {
    RequestState.SUBMITTED: frozenset({RequestState.VERIFIED}),
    RequestState.VERIFIED: frozenset({RequestState.ACKNOWLEDGED}),
    RequestState.ACKNOWLEDGED: frozenset({RequestState.UNDER_REVIEW}),
    RequestState.UNDER_REVIEW: frozenset({RequestState.DECIDED}),
    RequestState.DECIDED: frozenset({RequestState.EXECUTING, RequestState.REJECTED}),
    RequestState.EXECUTING: frozenset({RequestState.COMPLETED}),
    RequestState.COMPLETED: frozenset(),
    RequestState.REJECTED: frozenset(),
}

TERMINAL_STATES = frozenset({RequestState.COMPLETED, RequestState.REJECTED})

# Everything a response message is allowed to be. There is deliberately no
# "redirect" kind: pointing the subject at some other controller is not a
# response, and nothing in this package can emit one.
RESPONSE_KINDS = ("acknowledgment", "rejection", "completion", "extension-notice")


@dataclass(frozen=True)
class ResponseMessage:
    kind: str
    text: str
    issued_at: float

    def __post_init__(self) -> None:
        if self.kind not in RESPONSE_KINDS:
            raise ValueError(f"unknown response kind {self.kind!r}")

    def to_payload(self) -> dict:
        return {"kind": self.kind, "text": self.text, "issued_at": self.issued_at}


VERIFICATION_LEVELS = ("none", "email", "strong-id")


def level_rank(level: str) -> int:
    try:
        return VERIFICATION_LEVELS.index(level)
    except ValueError:
        raise ValueError(f"unknown verification level {level!r}") from None


@dataclass(frozen=True)
class VerificationPolicy:
    """How strongly users register vs. how strongly rights are gated.

    Demanding stronger credentials to erase data than to hand it over is an
    undue burden; the service refuses to start in that shape.
    """

    registration_level: str = "email"
    rights_level: str = "email"

    def __post_init__(self) -> None:
        level_rank(self.registration_level)
        level_rank(self.rights_level)

    @property
    def proportionate(self) -> bool:
        return level_rank(self.rights_level) <= level_rank(self.registration_level)


@dataclass
class RTBFRequest:
    request_id: str
    subject_id: str
    selector: Selector
    grounds: tuple[GroundClaim, ...]
    received_at: float
    state: RequestState = RequestState.SUBMITTED
    acknowledged_at: Optional[float] = None
    extension_notice_at: Optional[float] = None
    decision: Optional[PolicyDecision] = None
    receipt_id: Optional[str] = None
    response: Optional[ResponseMessage] = None
    escalated: bool = False
    parked_no_source: bool = False
    state_history: list[tuple[str, float]] = field(default_factory=list)

    def advance(self, to: RequestState, at: float) -> None:
        allowed = _TRANSITIONS[self.state]
        if to not in allowed:
            raise WrongState(f"{self.request_id}: {self.state.value} -> {to.value}")
        if self.state_history and at < self.state_history[-1][1]:
            raise WrongState(f"{self.request_id}: time went backward")
        self.state = to
        self.state_history.append((to.value, at))

    def deadline_at(self, decide_within: float) -> float:
        return self.received_at + decide_within

    def to_payload(self) -> dict:
        return {
            "request_id": self.request_id,
            "subject_id": self.subject_id,
            "selector": self.selector.to_payload(),
            "grounds": [c.to_payload() for c in self.grounds],
            "received_at": self.received_at,
            "state": self.state.value,
            "acknowledged_at": self.acknowledged_at,
            "extension_notice_at": self.extension_notice_at,
            "decision": self.decision.to_payload() if self.decision else None,
            "receipt_id": self.receipt_id,
            "response": self.response.to_payload() if self.response else None,
            "escalated": self.escalated,
            "parked_no_source": self.parked_no_source,
            "state_history": [list(item) for item in self.state_history],
        }
