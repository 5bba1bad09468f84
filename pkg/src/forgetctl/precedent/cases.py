"""Enforcement-case corpus model.

Each case is an annotated regulator decision: what failure categories it
cites (the rule side) and which concrete fact tags applied (the application
side). The fifteen named categories are fixed, as is their assignment to the
four erasure tasks a controller has to get right: talking to data subjects,
resolving policy, erasing from processing systems, erasing from storage.

The tag vocabulary below is the modeling core of this module. Matching two
cases on "same application of the rule" is operationalized as a shared
normalized tag, so tags must be specific enough to distinguish, say, a broken
web form from an undeliverable inbox, but stable enough that two annotators
would pick the same one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from ..errors import ConfigUnparseable


class Category(str, Enum):
    UI_TROUBLE = "UI-TROUBLE"
    VERIFY_MORE = "VERIFY-MORE"
    NO_RESPONSE = "NO-RESPONSE"
    LATE_RESPONSE = "LATE-RESPONSE"
    EXPLAIN = "EXPLAIN"
    EXMPT_GDPR = "EXMPT-GDPR"
    EXMPT_OTH = "EXMPT-OTH"
    EXMPT_ALL = "EXMPT-ALL"
    PROPAGATE = "PROPAGATE"
    NO_API = "NO_API"
    BAD_SERV = "BAD_SERV"
    DBMS = "DBMS"
    OMIT = "OMIT"
    DEFLECT = "DEFLECT"
    NO_SRC = "NO-SRC"

    @property
    def rtbf_task(self) -> "RtbfTask":
        return _CATEGORY_TASK[self]


class RtbfTask(str, Enum):
    SUBJECT_INTERFACE = "subject-interface"
    POLICY_RESOLUTION = "policy-resolution"
    PROCESSING_ERASURE = "processing-erasure"
    STORAGE_ERASURE = "storage-erasure"


# Which of the four erasure tasks each failure category belongs to. Fixed:
# summaries, treemap coloring, and task-share assertions all key off this.
_CATEGORY_TASK: dict[Category, RtbfTask] = {
    Category.UI_TROUBLE: RtbfTask.SUBJECT_INTERFACE,
    Category.VERIFY_MORE: RtbfTask.SUBJECT_INTERFACE,
    Category.NO_RESPONSE: RtbfTask.SUBJECT_INTERFACE,
    Category.LATE_RESPONSE: RtbfTask.SUBJECT_INTERFACE,
    Category.EXPLAIN: RtbfTask.SUBJECT_INTERFACE,
    Category.DEFLECT: RtbfTask.SUBJECT_INTERFACE,
    Category.NO_SRC: RtbfTask.SUBJECT_INTERFACE,
    Category.EXMPT_GDPR: RtbfTask.POLICY_RESOLUTION,
    Category.EXMPT_OTH: RtbfTask.POLICY_RESOLUTION,
    Category.EXMPT_ALL: RtbfTask.POLICY_RESOLUTION,
    Category.BAD_SERV: RtbfTask.POLICY_RESOLUTION,
    Category.PROPAGATE: RtbfTask.PROCESSING_ERASURE,
    Category.NO_API: RtbfTask.PROCESSING_ERASURE,
    Category.OMIT: RtbfTask.PROCESSING_ERASURE,
    Category.DBMS: RtbfTask.STORAGE_ERASURE,
}


# Normalized fact tags. A case carries the tags that describe *how* the rule
# was violated; two cases with a tag in common failed the same way.
TAG_VOCABULARY: dict[str, str] = {
    # interfacing: submitting a request
    "rtbf-channel-unspecified": "no stated way to submit an erasure request",
    "broken-webform": "published erasure form errors out or dead-ends",
    "undeliverable-email": "published erasure contact address bounces",
    "pre-questionnaire-required": "form demands an unrelated questionnaire first",
    # interfacing: verification
    "photo-id-required": "national photo ID demanded to erase, not to register",
    "physical-signature-required": "wet-ink signature demanded for a web service",
    "photo-upload-to-be-matched": "subjects must submit media so it can be matched",
    # interfacing: response time
    "ack-missing": "request never acknowledged at all",
    "ack-after-deadline": "first response after the statutory month",
    # interfacing: explanations
    "explanation-missing": "rejection sent with no reasoning at all",
    "statutory-retention-unexplained": "kept for a retention law but never said so",
    "erasure-log-exemption-unexplained": "erasure-request log retained, not explained",
    "debt-retention-unexplained": "kept pending unpaid debt, never explained",
    # interfacing: deflection and provenance
    "redirected-to-other-controller": "subject sent to a different controller",
    "requester-unverifiable-legacy-data": "data source cannot authenticate the subject",
    # policy resolution
    "ground-assessment-wrong": "an erasure ground misjudged as inapplicable",
    "objection-weighing-skipped": "objection honored or refused without weighing",
    "consent-withdrawal-ignored": "withdrawn consent treated as still valid",
    "child-data-ground-missed": "data collected from a child, ground not considered",
    "expression-exemption-overbroad": "journalistic exemption stretched past its scope",
    "retention-law-misread": "national retention statute misapplied to erasure",
    "tax-record-retention-misapplied": "tax-law retention cited for non-tax data",
    "betting-ledger-retention-misapplied": "gambling-law retention cited too broadly",
    "layered-exemption-confusion": "domestic and GDPR exemptions tangled together",
    "loyalty-benefits-tied-to-identifier": "benefits cancelled when identifier erased",
    "service-history-erased-wholesale": "entire history destroyed to honor one erasure",
    "free-trial-abuse-screen": "retention justified as abuse prevention",
    # processing erasure
    "marketing-list-not-purged": "campaign lists kept mailing after erasure",
    "missing-delete-api": "a processor or subsystem offers no deletion call",
    "manual-fanout-error": "humans copy deletes into disjoint systems, one missed",
    "delete-request-dropped": "software bug silently dropped the delete",
    "wrong-ttl-configured": "expiry timer set wrong so data outlived its term",
    "legacy-system-no-delete": "migrated-away system cannot erase old rows",
    "training-set-match-incomplete": "model training data not fully located",
    "missing-admin-privileges": "operator lacks rights to erase from the system",
    "claimed-done-no-action": "completion reported while nothing was erased",
    "anonymized-not-deleted": "records anonymized in place and retained",
    # storage erasure
    "pii-primary-key": "personal identifier used as a primary key",
    "foreign-key-blocks-delete": "referential constraints block row deletion",
    "backup-not-purged": "erased data still present in backup sets",
    # applications first seen after the corpus years
    "captcha-wall-on-rtbf-form": "erasure form gated behind a broken captcha",
    "dsar-portal-login-required": "erasure gated behind an account the subject lost",
    "voice-assistant-transcripts-kept": "assistant transcripts missed by erasure",
    "parquet-immutable-partition": "columnar partitions nobody can rewrite",
    "billing-archive-exemption-misread": "billing archive retention misapplied",
    "crm-sync-reimported-contact": "two-way sync reimported the erased contact",
}


@dataclass(frozen=True)
class EnforcementCase:
    """One annotated regulator decision."""

    case_id: str
    year: int
    categories: frozenset[Category]
    rule_refs: tuple[str, ...] = ()
    application: frozenset[str] = frozenset()
    note: str = ""
    uncategorized: bool = False

    def __post_init__(self) -> None:
        if not self.case_id:
            raise ValueError("case_id must be non-empty")
        if self.uncategorized and self.categories:
            raise ValueError(f"{self.case_id}: uncategorized cases carry no categories")
        if not self.uncategorized and not self.categories:
            raise ValueError(f"{self.case_id}: at least one category unless uncategorized")
        unknown = self.application - TAG_VOCABULARY.keys()
        if unknown:
            raise ValueError(f"{self.case_id}: tags outside the vocabulary: {sorted(unknown)}")

    def to_payload(self) -> dict:
        return {
            "case_id": self.case_id,
            "year": self.year,
            "categories": sorted(c.value for c in self.categories),
            "rule_refs": list(self.rule_refs),
            "application": sorted(self.application),
            "note": self.note,
            "uncategorized": self.uncategorized,
        }

    @staticmethod
    def from_payload(raw: dict) -> "EnforcementCase":
        return EnforcementCase(
            case_id=raw["case_id"],
            year=int(raw["year"]),
            categories=frozenset(Category(c) for c in raw.get("categories", ())),
            rule_refs=tuple(raw.get("rule_refs", ())),
            application=frozenset(raw.get("application", ())),
            note=raw.get("note", ""),
            uncategorized=bool(raw.get("uncategorized", False)),
        )


def load_corpus(path: Path) -> tuple[EnforcementCase, ...]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigUnparseable(f"cannot read corpus {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise ConfigUnparseable(f"{path}: corpus must be a JSON array of cases")
    cases = tuple(EnforcementCase.from_payload(item) for item in raw)
    seen: set[str] = set()
    for case in cases:
        if case.case_id in seen:
            raise ConfigUnparseable(f"{path}: duplicate case_id {case.case_id}")
        seen.add(case.case_id)
    return cases


def save_corpus(cases: tuple[EnforcementCase, ...], path: Path) -> None:
    Path(path).write_text(
        json.dumps([c.to_payload() for c in cases], indent=1) + "\n")


_FIXTURES = Path(__file__).parent / "fixtures"


def bundled_corpus() -> tuple[EnforcementCase, ...]:
    """The annotated first-five-years corpus shipped with the package."""
    return load_corpus(_FIXTURES / "five_year_corpus.json")


def bundled_year6() -> tuple[EnforcementCase, ...]:
    """The annotated year-six cases shipped with the package."""
    return load_corpus(_FIXTURES / "year6_cases.json")
