"""Strong/weak/no-match function over annotated enforcement cases.

A new case matches the corpus strongly when some prior case shares both a
failure category and at least one application tag: the same rule broke the
same way, so fixing the prior failure would have prevented this one. Sharing
only a category is a weak match; sharing neither is no match at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cases import Category, EnforcementCase


@dataclass(frozen=True)
class MatchResult:
    kind: str  # "strong" | "weak" | "no-match"
    category: Optional[Category] = None
    matched_case_id: Optional[str] = None

    @staticmethod
    def strong(category: Category, case_id: str) -> "MatchResult":
        return MatchResult("strong", category, case_id)

    @staticmethod
    def weak(category: Category) -> "MatchResult":
        return MatchResult("weak", category)

    @staticmethod
    def no_match() -> "MatchResult":
        return MatchResult("no-match")

    def to_payload(self) -> dict:
        return {
            "kind": self.kind,
            "category": self.category.value if self.category else None,
            "matched_case_id": self.matched_case_id,
        }


def match_case(case: EnforcementCase,
               corpus: tuple[EnforcementCase, ...]) -> MatchResult:
    """Deterministic: categories are scanned in declaration order and prior
    cases by ascending case_id, so ties always resolve the same way.
    """
    candidates = [c for c in corpus if not c.uncategorized]
    weak_category: Optional[Category] = None
    for category in Category:
        if category not in case.categories:
            continue
        peers = sorted((c for c in candidates if category in c.categories),
                       key=lambda c: c.case_id)
        if peers and weak_category is None:
            weak_category = category
        for peer in peers:
            if case.application & peer.application:
                return MatchResult.strong(category, peer.case_id)
    if weak_category is not None:
        return MatchResult.weak(weak_category)
    return MatchResult.no_match()


def match_all(cases: tuple[EnforcementCase, ...],
              corpus: tuple[EnforcementCase, ...]) -> dict[str, MatchResult]:
    return {case.case_id: match_case(case, corpus) for case in cases}


def tally(results: dict[str, MatchResult]) -> dict[str, int]:
    counts = {"strong": 0, "weak": 0, "no-match": 0}
    for result in results.values():
        counts[result.kind] += 1
    return counts
