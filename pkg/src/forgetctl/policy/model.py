"""Erasure-policy domain types: grounds, exemptions, decisions."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping


class Ground(str, Enum):
    """The six conditions under which erasure can be demanded."""

    PURPOSE_EXPIRED = "purpose-expired"
    CONSENT_WITHDRAWN = "consent-withdrawn"
    OBJECTION = "objection"
    UNLAWFUL_PROCESSING = "unlawful-processing"
    LEGAL_OBLIGATION_TO_ERASE = "legal-obligation-to-erase"
    CHILD_CONSENT = "child-consent"

    @property
    def article(self) -> str:
        return _GROUND_ARTICLES[self]


_GROUND_ARTICLES = {
    Ground.PURPOSE_EXPIRED: "17(1)(a)",
    Ground.CONSENT_WITHDRAWN: "17(1)(b)",
    Ground.OBJECTION: "17(1)(c)",
    Ground.UNLAWFUL_PROCESSING: "17(1)(d)",
    Ground.LEGAL_OBLIGATION_TO_ERASE: "17(1)(e)",
    Ground.CHILD_CONSENT: "17(1)(f)",
}

# Declarative fact keys that must be truthy for a claim to hold. Fact-finding
# happens upstream; this layer never infers facts from stored data.
REQUIRED_FACTS: dict[Ground, tuple[str, ...]] = {
    Ground.PURPOSE_EXPIRED: ("purpose_expired",),
    Ground.CONSENT_WITHDRAWN: ("consent_withdrawn",),
    Ground.OBJECTION: ("objection_raised",),
    Ground.UNLAWFUL_PROCESSING: ("processing_unlawful",),
    Ground.LEGAL_OBLIGATION_TO_ERASE: ("erasure_required_by_law",),
    Ground.CHILD_CONSENT: ("collected_from_child",),
}


@dataclass(frozen=True)
class GroundClaim:
    ground: Ground
    facts: Mapping[str, object] = field(default_factory=dict)

    def is_supported(self) -> bool:
        if not all(self.facts.get(key) for key in REQUIRED_FACTS[self.ground]):
            return False
        if self.ground is Ground.OBJECTION and self.facts.get("overriding_legitimate_grounds"):
            return False
        return True

    def to_payload(self) -> dict:
        return {"ground": self.ground.value, "facts": dict(self.facts)}

    @staticmethod
    def from_payload(raw: dict) -> "GroundClaim":
        return GroundClaim(ground=Ground(raw["ground"]), facts=dict(raw.get("facts", {})))

    @staticmethod
    def supported(ground: Ground) -> "GroundClaim":
        """A claim whose declared facts satisfy the ground's requirements."""
        facts = {key: True for key in REQUIRED_FACTS[ground]}
        return GroundClaim(ground=ground, facts=facts)


class Exemption(str, Enum):
    """The five erasure carve-outs a controller can invoke."""

    FREEDOM_OF_EXPRESSION = "freedom-of-expression"
    LEGAL_OBLIGATION_OR_PUBLIC_TASK = "legal-obligation-or-public-task"
    PUBLIC_HEALTH = "public-health"
    ARCHIVING_RESEARCH = "archiving-research"
    LEGAL_CLAIMS = "legal-claims"

    @property
    def article(self) -> str:
        return _EXEMPTION_ARTICLES[self]


_EXEMPTION_ARTICLES = {
    Exemption.FREEDOM_OF_EXPRESSION: "17(3)(a)",
    Exemption.LEGAL_OBLIGATION_OR_PUBLIC_TASK: "17(3)(b)",
    Exemption.PUBLIC_HEALTH: "17(3)(c)",
    Exemption.ARCHIVING_RESEARCH: "17(3)(d)",
    Exemption.LEGAL_CLAIMS: "17(3)(e)",
}


class Certainty(str, Enum):
    CLEAR = "clear"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class ExemptionAssertion:
    """An exemption enters evaluation only through a record of who asserted
    it and why; a bare enum value is not admissible."""

    exemption: Exemption
    asserted_by: str
    rationale: str
    certainty: Certainty = Certainty.AMBIGUOUS

    def __post_init__(self) -> None:
        if not self.asserted_by:
            raise ValueError("exemption assertion needs asserted_by")
        if not self.rationale:
            raise ValueError("exemption assertion needs a rationale")

    def to_payload(self) -> dict:
        return {"exemption": self.exemption.value, "asserted_by": self.asserted_by,
                "rationale": self.rationale, "certainty": self.certainty.value}

    @staticmethod
    def from_payload(raw: dict) -> "ExemptionAssertion":
        return ExemptionAssertion(
            exemption=Exemption(raw["exemption"]),
            asserted_by=raw["asserted_by"],
            rationale=raw["rationale"],
            certainty=Certainty(raw.get("certainty", "ambiguous")),
        )


class Outcome(str, Enum):
    HONOR = "honor"
    REJECT = "reject"
    ESCALATE = "escalate"


@dataclass(frozen=True)
class PolicyDecision:
    outcome: Outcome
    explanation: str = ""
    cited_exemptions: tuple[str, ...] = ()
    failed_grounds: tuple[str, ...] = ()
    escalation_reason: str = ""
    decided_by: str = "rules"
    decided_at: float = 0.0

    def to_payload(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "explanation": self.explanation,
            "cited_exemptions": list(self.cited_exemptions),
            "failed_grounds": list(self.failed_grounds),
            "escalation_reason": self.escalation_reason,
            "decided_by": self.decided_by,
            "decided_at": self.decided_at,
        }

    @staticmethod
    def from_payload(raw: dict) -> "PolicyDecision":
        return PolicyDecision(
            outcome=Outcome(raw["outcome"]),
            explanation=raw.get("explanation", ""),
            cited_exemptions=tuple(raw.get("cited_exemptions", ())),
            failed_grounds=tuple(raw.get("failed_grounds", ())),
            escalation_reason=raw.get("escalation_reason", ""),
            decided_by=raw.get("decided_by", "rules"),
            decided_at=float(raw.get("decided_at", 0.0)),
        )
