"""The erasure decision table.

Order of evaluation, most categorical first:

  1. non-natural-person requester        -> Reject (the right is personal)
  2. no supported ground                 -> Reject listing the failed grounds
  3. any clear exemption (asserted or
     synthesized from retention rules /
     protected categories)               -> Reject citing it
  4. only ambiguous exemptions           -> Escalate, never auto-Reject
  5. otherwise                           -> Honor

Ambiguity escalates instead of rejecting: regulators have fined controllers
for wrongly refusing, never for honoring a borderline request, so the table
leans toward the subject unless an exemption is beyond doubt. Every Reject
carries a human-readable explanation plus machine-readable citations; an
explanation-free rejection is unrepresentable through this function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import PolicyConfig
from .model import (
    Certainty,
    Exemption,
    ExemptionAssertion,
    GroundClaim,
    Outcome,
    PolicyDecision,
)


@dataclass(frozen=True)
class EvaluationContext:
    subject_is_natural_person: bool = True
    asserted_exemptions: tuple[ExemptionAssertion, ...] = ()
    data_categories: tuple[str, ...] = ()
    config: PolicyConfig = field(default_factory=PolicyConfig)


def effective_exemptions(context: EvaluationContext) -> tuple[ExemptionAssertion, ...]:
    """Asserted exemptions plus the ones rules synthesize on their own.

    A matching retention statute or a protected data category is a legal
    obligation to keep the data, asserted by the rule itself with clear
    certainty - no officer needs to remember to claim it.
    """
    assertions = list(context.asserted_exemptions)
    for category in context.data_categories:
        rule = context.config.retention_rule_for(category)
        if rule is not None:
            assertions.append(ExemptionAssertion(
                exemption=Exemption.LEGAL_OBLIGATION_OR_PUBLIC_TASK,
                asserted_by=f"retention-rule:{rule.statute}",
                rationale=(f"{category!r} data must be retained for "
                           f"{rule.retain_days:g} days under {rule.statute}"),
                certainty=Certainty.CLEAR,
            ))
        if category in context.config.protected_categories:
            assertions.append(ExemptionAssertion(
                exemption=Exemption.LEGAL_OBLIGATION_OR_PUBLIC_TASK,
                asserted_by=f"protected-category:{category}",
                rationale=(f"{category!r} records are themselves required for "
                           "demonstrating compliance and cannot be erased"),
                certainty=Certainty.CLEAR,
            ))
    return tuple(assertions)


def evaluate(claims: tuple[GroundClaim, ...], context: EvaluationContext,
             now: float = 0.0) -> PolicyDecision:
    """Total over every input: always returns a decision, never raises."""
    if not context.subject_is_natural_person:
        return PolicyDecision(
            outcome=Outcome.REJECT,
            explanation=("The right to erasure protects natural persons; the "
                         "requesting party is not one, so no claimed ground "
                         "can apply."),
            failed_grounds=tuple(c.ground.value for c in claims) or
            ("subject-not-natural-person",),
            decided_at=now,
        )

    exemptions = effective_exemptions(context)
    supported = [c for c in claims if c.is_supported()]

    if not supported:
        failed = tuple(c.ground.value for c in claims)
        if failed:
            detail = "the declared facts do not support: " + ", ".join(
                f"{c.ground.value} ({c.ground.article})" for c in claims)
        else:
            detail = "the request claims no erasure ground at all"
        return PolicyDecision(
            outcome=Outcome.REJECT,
            explanation=f"No valid erasure ground: {detail}.",
            failed_grounds=failed or ("no-ground-claimed",),
            decided_at=now,
        )

    clear = [a for a in exemptions if a.certainty is Certainty.CLEAR]
    if clear:
        cited = tuple(dict.fromkeys(a.exemption.value for a in clear))
        lines = "; ".join(
            f"{a.exemption.value} ({a.exemption.article}), asserted by "
            f"{a.asserted_by}: {a.rationale}" for a in clear)
        return PolicyDecision(
            outcome=Outcome.REJECT,
            explanation=f"A clear exemption overrides the claimed grounds: {lines}.",
            cited_exemptions=cited,
            decided_at=now,
        )

    if exemptions:
        names = ", ".join(
            f"{a.exemption.value} (asserted by {a.asserted_by})" for a in exemptions)
        return PolicyDecision(
            outcome=Outcome.ESCALATE,
            escalation_reason=(f"Exemptions of ambiguous applicability need a "
                               f"human call: {names}."),
            decided_at=now,
        )

    return PolicyDecision(outcome=Outcome.HONOR, decided_at=now)


def validate_decision(decision: PolicyDecision,
                      exemptions_on_record: tuple[ExemptionAssertion, ...] = (),
                      ) -> list[str]:
    """Compliance lint over a finished decision; empty list means OK."""
    violations: list[str] = []
    if decision.outcome is Outcome.REJECT:
        if not decision.explanation.strip():
            violations.append("reject-without-explanation")
        if not decision.cited_exemptions and not decision.failed_grounds:
            violations.append("reject-without-citation")
    if decision.outcome is Outcome.HONOR:
        clear = [a for a in exemptions_on_record if a.certainty is Certainty.CLEAR]
        if clear:
            violations.append("honor-despite-clear-exemption")
    return violations
