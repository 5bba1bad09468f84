from .audit import AuditRecord, AuditTrail
from .requests import (
    RequestState,
    ResponseMessage,
    RTBFRequest,
    RESPONSE_KINDS,
    TERMINAL_STATES,
    VERIFICATION_LEVELS,
    VerificationPolicy,
    level_rank,
)
from .service import RTBFService, ServiceConfig, SubjectRecord
from .sharing import (
    ExternalRecipient,
    PropagationAction,
    PropagationOutcome,
    classify_recipient,
)

__all__ = [
    "AuditRecord",
    "AuditTrail",
    "ExternalRecipient",
    "PropagationAction",
    "PropagationOutcome",
    "RequestState",
    "ResponseMessage",
    "RTBFRequest",
    "RTBFService",
    "RESPONSE_KINDS",
    "ServiceConfig",
    "SubjectRecord",
    "TERMINAL_STATES",
    "VERIFICATION_LEVELS",
    "VerificationPolicy",
    "classify_recipient",
    "level_rank",
]
