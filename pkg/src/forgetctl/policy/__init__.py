"""Erasure-request policy: grounds, exemptions, the decision table, deadlines."""

from .config import DeadlinePolicy, PolicyConfig, RetentionRule, load_policy_config
from .deadlines import DeadlineOutcome, deadline_check
from .engine import EvaluationContext, effective_exemptions, evaluate, validate_decision
from .model import (
    Certainty,
    Exemption,
    ExemptionAssertion,
    Ground,
    GroundClaim,
    Outcome,
    PolicyDecision,
)

__all__ = [
    "Certainty",
    "DeadlineOutcome",
    "DeadlinePolicy",
    "EvaluationContext",
    "Exemption",
    "ExemptionAssertion",
    "Ground",
    "GroundClaim",
    "Outcome",
    "PolicyConfig",
    "PolicyDecision",
    "RetentionRule",
    "deadline_check",
    "effective_exemptions",
    "evaluate",
    "load_policy_config",
    "validate_decision",
]
