#!/usr/bin/env python3
"""Regenerate the bundled enforcement-corpus fixtures.

The fixtures are deterministic, hand-designed data: anchor cases carry
individually written annotation notes, the bulk of each category is filled
with templated-but-varied entries, and every invariant the package relies on
is checked before a byte is written (per-category counts, tag vocabulary,
the strong/weak split of the year-six set, novel-tag disjointness).

Run from the repository root:

    python3 scripts/build_corpora.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from forgetctl.precedent.cases import (  # noqa: E402
    Category,
    EnforcementCase,
    TAG_VOCABULARY,
    save_corpus,
)
from forgetctl.precedent.matching import match_all, tally  # noqa: E402
from forgetctl.precedent.summary import summarize  # noqa: E402

FIXTURES = Path(__file__).resolve().parent.parent / \
    "src" / "forgetctl" / "precedent" / "fixtures"

# Exact number of corpus cases citing each category.
CATEGORY_COUNTS = {
    Category.UI_TROUBLE: 8,
    Category.VERIFY_MORE: 8,
    Category.NO_RESPONSE: 54,
    Category.LATE_RESPONSE: 25,
    Category.EXPLAIN: 8,
    Category.EXMPT_GDPR: 41,
    Category.EXMPT_OTH: 24,
    Category.EXMPT_ALL: 13,
    Category.PROPAGATE: 5,
    Category.NO_API: 15,
    Category.BAD_SERV: 5,
    Category.DBMS: 3,
    Category.OMIT: 17,
    Category.DEFLECT: 3,
    Category.NO_SRC: 2,
}
UNCATEGORIZED = 5

RULE_REFS = {
    Category.UI_TROUBLE: ("17(1)", "12(2)"),
    Category.VERIFY_MORE: ("17(1)", "12(6)"),
    Category.NO_RESPONSE: ("17(1)", "12(3)"),
    Category.LATE_RESPONSE: ("17(1)", "12(3)"),
    Category.EXPLAIN: ("17(1)", "12(4)"),
    Category.EXMPT_GDPR: ("17(1)", "17(3)"),
    Category.EXMPT_OTH: ("17(1)", "17(3)(b)"),
    Category.EXMPT_ALL: ("17(1)", "17(3)", "17(3)(b)"),
    Category.PROPAGATE: ("17(1)", "19"),
    Category.NO_API: ("17(1)",),
    Category.BAD_SERV: ("17(1)",),
    Category.DBMS: ("17(1)", "25"),
    Category.OMIT: ("17(1)", "5(1)(a)"),
    Category.DEFLECT: ("17(1)", "26"),
    Category.NO_SRC: ("17(1)", "12(6)"),
}

# Tags the bulk generator cycles through, per category. Every tag here is
# corpus-era: the six year-six novel tags never appear in the 5-year corpus.
BULK_TAGS = {
    Category.UI_TROUBLE: ["broken-webform", "rtbf-channel-unspecified",
                          "undeliverable-email"],
    Category.VERIFY_MORE: ["photo-id-required", "physical-signature-required"],
    Category.NO_RESPONSE: ["ack-missing"],
    Category.LATE_RESPONSE: ["ack-after-deadline"],
    Category.EXPLAIN: ["explanation-missing"],
    Category.EXMPT_GDPR: ["ground-assessment-wrong", "objection-weighing-skipped",
                          "consent-withdrawal-ignored",
                          "expression-exemption-overbroad",
                          "child-data-ground-missed"],
    Category.EXMPT_OTH: ["retention-law-misread",
                         "tax-record-retention-misapplied"],
    Category.EXMPT_ALL: ["layered-exemption-confusion"],
    Category.PROPAGATE: ["marketing-list-not-purged"],
    Category.NO_API: ["missing-delete-api", "manual-fanout-error",
                      "delete-request-dropped", "wrong-ttl-configured",
                      "legacy-system-no-delete"],
    Category.BAD_SERV: ["loyalty-benefits-tied-to-identifier"],
    Category.DBMS: ["pii-primary-key"],
    Category.OMIT: ["claimed-done-no-action"],
    Category.DEFLECT: ["redirected-to-other-controller"],
    Category.NO_SRC: ["requester-unverifiable-legacy-data"],
}

REGULATORS = ["the Danish DPA", "the French CNIL", "the Spanish AEPD",
              "the Italian Garante", "a German state DPA", "the Dutch AP",
              "the Polish UODO", "the Greek HDPA", "the Swedish IMY",
              "the Norwegian Datatilsynet", "the Belgian APD",
              "the Hungarian NAIH", "the Austrian DSB", "the Finnish DPA"]

SECTORS = ["an online retailer", "a telecom operator", "a hospitality chain",
           "a media site", "a fintech startup", "a recruitment platform",
           "a utilities provider", "a social network", "an insurer",
           "a debt collector", "a dating app", "a fitness platform",
           "an advertising broker", "a municipal office"]

BULK_NOTE = {
    Category.UI_TROUBLE: "sanctioned {sector} because its published erasure "
                         "channel did not work in practice",
    Category.VERIFY_MORE: "found {sector} demanding stronger proof of "
                          "identity for erasure than it ever asked at signup",
    Category.NO_RESPONSE: "fined {sector} for never answering an erasure "
                          "request",
    Category.LATE_RESPONSE: "found {sector} first replied to an erasure "
                            "request well after the one-month window",
    Category.EXPLAIN: "agreed {sector} could refuse but fined it for a "
                      "rejection with no individual reasoning",
    Category.EXMPT_GDPR: "found {sector} misread an in-regulation exemption "
                         "when refusing erasure",
    Category.EXMPT_OTH: "found {sector} misapplied a domestic retention "
                        "statute against an erasure request",
    Category.EXMPT_ALL: "found {sector} tangled domestic law and "
                        "regulation exemptions into an unsupported refusal",
    Category.PROPAGATE: "found erasure at {sector} never reached every "
                        "internal processing system",
    Category.NO_API: "found the data systems at {sector} gave erasure no "
                     "workable deletion path",
    Category.BAD_SERV: "found {sector} refusing erasure because honoring it "
                       "would degrade the remaining service",
    Category.DBMS: "ordered {sector} to re-architect storage that blocked "
                   "row deletion",
    Category.OMIT: "found {sector} reported completed erasure while the "
                   "records were untouched",
    Category.DEFLECT: "found {sector} redirecting the subject to another "
                      "controller instead of acting",
    Category.NO_SRC: "found {sector} holding data from a legacy source that "
                     "could not authenticate the requester",
}

# Hand-annotated anchors. Notes cite the decision each entry is modeled on.
ANCHORS: dict[Category, list[tuple[int, tuple[str, ...], str]]] = {
    Category.UI_TROUBLE: [
        (2019, ("pre-questionnaire-required",),
         "modeled on the Spanish fine against a search provider that made "
         "people complete a pre-questionnaire before an erasure request "
         "could even be submitted"),
        (2021, ("broken-webform", "undeliverable-email"),
         "controller's published erasure page errored out and the fallback "
         "mailbox bounced; both channels dead at once"),
    ],
    Category.VERIFY_MORE: [
        (2020, ("photo-id-required",),
         "modeled on the Irish reprimand of a deals marketplace that "
         "required a national photo ID for erasure but not for signup"),
        (2022, ("photo-id-required",),
         "modeled on the Irish reprimand of a microblogging service over "
         "the same photo-ID demand"),
        (2019, ("physical-signature-required",),
         "modeled on the Austrian case of an online service insisting on a "
         "wet-ink signature"),
        (2021, ("photo-upload-to-be-matched",),
         "modeled on the facial-recognition aggregator that told subjects "
         "to upload photographs of themselves so matches could be found"),
    ],
    Category.EXPLAIN: [
        (2020, ("explanation-missing",),
         "modeled on the decision where a search provider's rejection was "
         "substantively right yet fined for lacking any explanation"),
        (2021, ("explanation-missing",),
         "modeled on the parallel decision against a music-streaming "
         "service: right call, no reasoning attached"),
        (2019, ("statutory-retention-unexplained",
                "betting-ledger-retention-misapplied"),
         "modeled on the Danish betting-operator case: wagers must be kept "
         "five years by gambling law, but the rejection never said so"),
        (2022, ("erasure-log-exemption-unexplained",),
         "modeled on the Belgian case: the erasure-request log itself is "
         "exempt from erasure, which the response omitted"),
        (2020, ("debt-retention-unexplained",),
         "modeled on the Hungarian case: payment-default data kept until "
         "the debt clears, with the reasoning left out of the reply"),
    ],
    Category.EXMPT_OTH: [
        (2019, ("betting-ledger-retention-misapplied",),
         "gambling-ledger retention stretched to cover marketing data "
         "far outside the statute"),
    ],
    Category.PROPAGATE: [
        (2019, ("marketing-list-not-purged",),
         "modeled on the Swedish reprimand of a calling-service provider "
         "that kept sending marketing mail after an honored erasure"),
        (2019, ("missing-delete-api",),
         "modeled on the Danish criticism of a municipality whose "
         "third-party processor offered no on-demand deletion API"),
        (2021, ("backup-not-purged",),
         "honored erasure never reached the nightly backup sets, which "
         "kept restoring the records"),
        (2020, ("marketing-list-not-purged", "manual-fanout-error"),
         "suppression list updated by hand across three campaign tools; "
         "one was missed"),
        (2022, ("missing-delete-api", "backup-not-purged"),
         "externally shared copies sat with a processor that had no "
         "deletion endpoint and no purge schedule"),
    ],
    Category.NO_API: [
        (2020, ("manual-fanout-error",),
         "employees re-keyed each delete into disjoint systems; one "
         "request was dropped in transcription"),
        (2021, ("delete-request-dropped",),
         "a queue bug silently discarded delete jobs before processing"),
        (2019, ("wrong-ttl-configured",),
         "expiry timers set to the wrong unit let data outlive its term"),
        (2022, ("legacy-system-no-delete",),
         "after a platform migration the retired system could no longer "
         "erase its historical rows"),
        (2022, ("training-set-match-incomplete",),
         "a model vendor could not locate all training items matching the "
         "subject"),
        (2021, ("missing-admin-privileges",),
         "a public body lacked administrative rights to erase records from "
         "its own web system"),
        (2019, ("missing-delete-api",),
         "third-party processor exposed no deletion call at all"),
    ],
    Category.BAD_SERV: [
        (2020, ("loyalty-benefits-tied-to-identifier",),
         "modeled on the Austrian loyalty-program case: erase the email "
         "and phone, lose every accrued benefit"),
        (2019, ("service-history-erased-wholesale",),
         "modeled on the Danish taxi case: erasing a phone number would "
         "wipe the customer's full ride history and degrade their service"),
        (2021, ("free-trial-abuse-screen",),
         "modeled on the streaming free-trial decision: card data retention "
         "to prevent repeat trials was accepted, the blanket refusal "
         "around it was not"),
    ],
    Category.DBMS: [
        (2019, ("pii-primary-key", "foreign-key-blocks-delete"),
         "modeled on the Danish taxi case: phone numbers as primary keys "
         "made row deletion break referential integrity"),
        (2020, ("pii-primary-key",),
         "modeled on the French retail case: email addresses as keys, "
         "worked around with ad hoc tooling during the investigation"),
        (2021, ("foreign-key-blocks-delete",),
         "cascade constraints left orphan-protection rules that vetoed "
         "the delete"),
    ],
    Category.OMIT: [
        (2020, ("anonymized-not-deleted",),
         "modeled on the Greek insurer case: customer data anonymized in "
         "place so it could be kept past expiry and past the request"),
        (2019, ("claimed-done-no-action", "anonymized-not-deleted"),
         "modeled on the Danish ride-records case: nine million trips "
         "pseudonymized, auxiliary data still re-identified them, and the "
         "response still said erased"),
    ],
    Category.NO_SRC: [
        (2021, ("requester-unverifiable-legacy-data",),
         "records ingested from an acquired business with no credentials "
         "to match requesters against"),
        (2022, ("requester-unverifiable-legacy-data",),
         "scraped directory data carried no way to authenticate the person "
         "asking for its removal"),
    ],
}

UNCATEGORIZED_NOTES = [
    "complaint filed over an initial refusal; the investigation found the "
    "data already deleted by the time the regulator looked",
    "a law firm asked to be forgotten off a negative list and was reminded "
    "the right belongs to natural persons",
    "one-off dispute over erasure of a court-ordered publication, resolved "
    "without naming a failure category",
    "single decision about erasure interacting with an ongoing insolvency "
    "proceeding; reasoning too entangled to categorize",
    "novel complaint about a since-discontinued service, closed with "
    "guidance only",
]


def build_five_year() -> list[EnforcementCase]:
    cases: list[EnforcementCase] = []
    serial = 0

    def next_id() -> str:
        nonlocal serial
        serial += 1
        return f"c5-{serial:03d}"

    for category in Category:
        target = CATEGORY_COUNTS[category]
        anchors = ANCHORS.get(category, [])
        assert len(anchors) <= target, category
        for year, tags, note in anchors:
            cases.append(EnforcementCase(
                case_id=next_id(), year=year,
                categories=frozenset({category}),
                rule_refs=RULE_REFS[category],
                application=frozenset(tags), note=note))
        pool = BULK_TAGS[category]
        for i in range(target - len(anchors)):
            tags = [pool[i % len(pool)]]
            if i % 3 == 0 and len(pool) > 1:
                tags.append(pool[(i + 1) % len(pool)])
            regulator = REGULATORS[(serial + i) % len(REGULATORS)]
            sector = SECTORS[(serial * 3 + i) % len(SECTORS)]
            note = f"{regulator} {BULK_NOTE[category].format(sector=sector)}"
            cases.append(EnforcementCase(
                case_id=next_id(), year=2018 + (serial + i) % 5,
                categories=frozenset({category}),
                rule_refs=RULE_REFS[category],
                application=frozenset(tags), note=note))

    for note in UNCATEGORIZED_NOTES:
        cases.append(EnforcementCase(
            case_id=next_id(), year=2019 + (serial % 4),
            categories=frozenset(), rule_refs=("17(1)",),
            application=frozenset(), note=note, uncategorized=True))
    return cases


# Year-six set: (category, year, tags, strong?, note). Strong cases reuse a
# corpus-era tag; weak cases carry only tags the corpus has never seen.
YEAR6: list[tuple[Category, int, tuple[str, ...], bool, str]] = [
    (Category.NO_RESPONSE, 2023, ("ack-missing",), True,
     "subscription box service; no reply in seven months"),
    (Category.NO_RESPONSE, 2023, ("ack-missing",), True,
     "regional job board ignored two erasure letters"),
    (Category.NO_RESPONSE, 2023, ("ack-missing",), True,
     "loyalty-card operator ignored a registered-mail request"),
    (Category.NO_RESPONSE, 2024, ("ack-missing",), True,
     "car-sharing app never answered in-app erasure tickets"),
    (Category.NO_RESPONSE, 2024, ("ack-missing",), True,
     "news archive ignored a delisting request entirely"),
    (Category.NO_RESPONSE, 2023, ("ack-missing",), True,
     "debt-collection agency never acknowledged the request"),
    (Category.NO_RESPONSE, 2024, ("ack-missing",), True,
     "telemarketing firm ignored erasure of a call list entry"),
    (Category.NO_RESPONSE, 2023, ("ack-missing",), True,
     "photo-hosting site never responded to a takedown-and-erase"),
    (Category.NO_RESPONSE, 2024, ("ack-missing",), True,
     "property portal ignored a landlord-profile erasure request"),
    (Category.LATE_RESPONSE, 2023, ("ack-after-deadline",), True,
     "bank acknowledged after 74 days citing internal routing"),
    (Category.LATE_RESPONSE, 2023, ("ack-after-deadline",), True,
     "airline loyalty desk replied in month three"),
    (Category.LATE_RESPONSE, 2024, ("ack-after-deadline",), True,
     "ticketing platform answered after the regulator called"),
    (Category.LATE_RESPONSE, 2024, ("ack-after-deadline",), True,
     "insurer's reply beat the fine but not the deadline"),
    (Category.LATE_RESPONSE, 2024, ("dsar-portal-login-required",), False,
     "rights portal only reachable after login; subject had deleted the "
     "account, so the clock ran out while support re-provisioned access"),
    (Category.UI_TROUBLE, 2023, ("broken-webform",), True,
     "erasure form's submit button failed for months"),
    (Category.UI_TROUBLE, 2023, ("rtbf-channel-unspecified",), True,
     "privacy policy named no route at all for erasure requests"),
    (Category.UI_TROUBLE, 2024, ("undeliverable-email",), True,
     "published privacy inbox had been decommissioned"),
    (Category.UI_TROUBLE, 2024, ("pre-questionnaire-required",), True,
     "marketing questionnaire gated the erasure form"),
    (Category.UI_TROUBLE, 2023, ("captcha-wall-on-rtbf-form",), False,
     "an accessibility-hostile captcha made the erasure form unusable; a "
     "failure mode no earlier decision had described"),
    (Category.UI_TROUBLE, 2024, ("dsar-portal-login-required",), False,
     "erasure only possible from inside an account the subject had "
     "already closed"),
    (Category.NO_API, 2023, ("missing-delete-api",), True,
     "analytics processor exposed no deletion endpoint"),
    (Category.NO_API, 2023, ("legacy-system-no-delete",), True,
     "sunset CRM kept records no current tool could erase"),
    (Category.NO_API, 2024, ("delete-request-dropped",), True,
     "event-bus consumer crashed and dropped queued deletes"),
    (Category.NO_API, 2024, ("training-set-match-incomplete",), True,
     "vendor could not find every training item for the subject"),
    (Category.NO_API, 2023, ("voice-assistant-transcripts-kept",), False,
     "voice-assistant transcripts sat outside every deletion pipeline; "
     "the first decision to reach this data class"),
    (Category.NO_API, 2024, ("parquet-immutable-partition",), False,
     "columnar lake partitions were append-only with no rewrite job, a "
     "storage shape no prior case covered"),
    (Category.EXMPT_GDPR, 2023, ("expression-exemption-overbroad",), True,
     "blog operator stretched the journalism exemption over ad pages"),
    (Category.EXMPT_GDPR, 2023, ("ground-assessment-wrong",), True,
     "controller decided the purpose-expiry ground could never apply"),
    (Category.EXMPT_GDPR, 2024, ("consent-withdrawal-ignored",), True,
     "newsletter operator treated withdrawn consent as still live"),
    (Category.EXMPT_GDPR, 2024, ("billing-archive-exemption-misread",), False,
     "invoice-archive duty was read as exempting the whole customer "
     "profile; the first decision on this misreading"),
    (Category.EXMPT_OTH, 2023, ("retention-law-misread",), True,
     "employment-records statute applied to a job applicant's data"),
    (Category.EXMPT_OTH, 2024, ("betting-ledger-retention-misapplied",), True,
     "gambling-ledger duty cited for a closed betting account's "
     "marketing profile"),
    (Category.PROPAGATE, 2023, ("marketing-list-not-purged",), True,
     "email campaigns kept firing after the erasure was honored"),
    (Category.PROPAGATE, 2024, ("crm-sync-reimported-contact",), False,
     "a two-way CRM sync restored the erased contact overnight; no "
     "earlier decision described reimport-after-delete"),
    (Category.OMIT, 2023, ("claimed-done-no-action",), True,
     "completion message sent while the rows sat untouched"),
    (Category.OMIT, 2024, ("anonymized-not-deleted",), True,
     "profile scrambled in place and retained as a shadow record"),
    (Category.OMIT, 2024, ("voice-assistant-transcripts-kept",), False,
     "erasure declared complete while assistant transcripts remained; "
     "novel surface, same empty promise"),
    (Category.DEFLECT, 2023, ("redirected-to-other-controller",), True,
     "platform pointed the subject at its payment processor and closed "
     "the ticket"),
    (Category.BAD_SERV, 2024, ("loyalty-benefits-tied-to-identifier",), True,
     "points balance forfeited because the key being erased was the "
     "member's email"),
    (Category.DBMS, 2024, ("pii-primary-key",), True,
     "membership number scheme derived from national ID blocked deletes"),
]


def build_year6() -> list[EnforcementCase]:
    cases = []
    for i, (category, year, tags, _strong, note) in enumerate(YEAR6, start=1):
        cases.append(EnforcementCase(
            case_id=f"y6-{i:02d}", year=year,
            categories=frozenset({category}),
            rule_refs=RULE_REFS[category],
            application=frozenset(tags), note=note))
    return cases


def main() -> None:
    corpus = build_five_year()
    year6 = build_year6()

    summary = summarize(tuple(corpus))
    for category, expected in CATEGORY_COUNTS.items():
        got = summary.category_counts[category]
        assert got == expected, f"{category.value}: {got} != {expected}"
    assert summary.uncategorized == UNCATEGORIZED
    assert summary.total_cases == sum(CATEGORY_COUNTS.values()) + UNCATEGORIZED

    corpus_tags = set().union(*(c.application for c in corpus))
    year6_tags = set().union(*(c.application for c in year6))
    assert corpus_tags <= TAG_VOCABULARY.keys()
    assert year6_tags <= TAG_VOCABULARY.keys()

    expected_weak = {f"y6-{i:02d}" for i, row in enumerate(YEAR6, start=1)
                     if not row[3]}
    results = match_all(tuple(year6), tuple(corpus))
    counts = tally(results)
    assert counts == {"strong": 32, "weak": 8, "no-match": 0}, counts
    got_weak = {cid for cid, r in results.items() if r.kind == "weak"}
    assert got_weak == expected_weak, got_weak ^ expected_weak
    # weak tags must be absent from the whole corpus, not just the category
    for cid in got_weak:
        case = next(c for c in year6 if c.case_id == cid)
        assert not (case.application & corpus_tags), cid

    FIXTURES.mkdir(parents=True, exist_ok=True)
    save_corpus(tuple(corpus), FIXTURES / "five_year_corpus.json")
    save_corpus(tuple(year6), FIXTURES / "year6_cases.json")
    print(f"wrote {len(corpus)} corpus cases, {len(year6)} year-6 cases")
    shares = summary.task_shares
    for task, share in shares.items():
        print(f"  {task.value}: {share:.1%}")


if __name__ == "__main__":
    main()
