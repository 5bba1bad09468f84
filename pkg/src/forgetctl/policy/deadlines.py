"""Response-deadline accounting.

The clock never blocks anything here: a deadline check classifies what
happened (or has not happened yet) so the compliance monitor can report it.
The two failure modes mirror the two most common real-world enforcement
patterns: silence, and answering late.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

from .config import DeadlinePolicy


class DeadlineOutcome(str, Enum):
    OK = "ok"
    LATE_RESPONSE = "late-response"
    NO_RESPONSE = "no-response"


def deadline_check(received_at: float, acknowledged_at: Optional[float],
                   now: float, policy: Optional[DeadlinePolicy] = None,
                   extension_notice_at: Optional[float] = None) -> DeadlineOutcome:
    """Classify acknowledgment timeliness.

    An extension notice sent within the window converts a late
    acknowledgment back to Ok (the complex-processing allowance); a notice
    sent after the window expired converts nothing.
    """
    policy = policy or DeadlinePolicy()
    window = policy.ack_within
    extended = (extension_notice_at is not None
                and extension_notice_at - received_at <= window)
    if acknowledged_at is None:
        if now - received_at > window and not extended:
            return DeadlineOutcome.NO_RESPONSE
        return DeadlineOutcome.OK
    if acknowledged_at - received_at <= window or extended:
        return DeadlineOutcome.OK
    return DeadlineOutcome.LATE_RESPONSE
