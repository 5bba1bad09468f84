"""Outbound deletion-propagation guard.

Data shared with external recipients raises two opposite risks: forwarding a
deletion where there is no legal basis for the transfer, and silently not
forwarding it where the recipient simply offers no deletion API. The guard
never transmits anything itself; it classifies each configured recipient and
hands back jobs, warnings, and suppressions for the caller to act on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class ExternalRecipient:
    name: str
    has_deletion_api: bool
    legal_basis: bool

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("recipient needs a name")


class PropagationAction(str, Enum):
    JOB_EMITTED = "job-emitted"
    WARNING_NO_API = "warning-no-api"
    SUPPRESSED_NO_LEGAL_BASIS = "suppressed-no-legal-basis"


@dataclass(frozen=True)
class PropagationOutcome:
    recipient: str
    action: PropagationAction
    detail: str

    def to_payload(self) -> dict:
        return {"recipient": self.recipient, "action": self.action.value,
                "detail": self.detail}


def classify_recipient(recipient: ExternalRecipient) -> PropagationOutcome:
    # No legal basis wins over everything: an unlawful propagation is worse
    # than an unpropagated deletion, so it is suppressed even if an API exists.
    if not recipient.legal_basis:
        return PropagationOutcome(
            recipient=recipient.name,
            action=PropagationAction.SUPPRESSED_NO_LEGAL_BASIS,
            detail="no legal basis recorded for pushing deletions to this recipient",
        )
    if not recipient.has_deletion_api:
        return PropagationOutcome(
            recipient=recipient.name,
            action=PropagationAction.WARNING_NO_API,
            detail="recipient offers no deletion API; manual follow-up required",
        )
    return PropagationOutcome(
        recipient=recipient.name,
        action=PropagationAction.JOB_EMITTED,
        detail="deletion job queued for recipient's API",
    )
