/** Precedent suggestions for the decision form.
 *
 * A tiny static casebook, matched against the open case's claimed grounds
 * and asserted exemptions. Strong matches share an exemption and a ground
 * with the open case; weak matches share only the exemption. Purely
 * advisory: nothing here feeds into validation or submission.
 */

export interface PriorCase {
  case_id: string;
  summary: string;
  grounds: string[];
  exemptions: string[];
  outcome: string;
}

export const CASEBOOK: readonly PriorCase[] = [
  {
    case_id: "prior-001",
    summary: "Journalist archive kept over objection; expression exemption upheld",
    grounds: ["objection"],
    exemptions: ["freedom-of-expression"],
    outcome: "reject",
  },
  {
    case_id: "prior-002",
    summary: "Consent withdrawn on marketing profile; no exemption survived review",
    grounds: ["consent-withdrawn"],
    exemptions: [],
    outcome: "honor",
  },
  {
    case_id: "prior-003",
    summary: "Tax records retention mandated by statute despite expired purpose",
    grounds: ["purpose-expired"],
    exemptions: ["legal-obligation-or-public-task"],
    outcome: "reject",
  },
  {
    case_id: "prior-004",
    summary: "Epidemiology dataset retained; public health exemption on objection",
    grounds: ["objection"],
    exemptions: ["public-health"],
    outcome: "reject",
  },
  {
    case_id: "prior-005",
    summary: "Longitudinal study cohort; research exemption held only for pseudonymized rows",
    grounds: ["consent-withdrawn"],
    exemptions: ["archiving-research"],
    outcome: "reject",
  },
  {
    case_id: "prior-006",
    summary: "Records under litigation hold; erasure deferred to claims exemption",
    grounds: ["purpose-expired", "objection"],
    exemptions: ["legal-claims"],
    outcome: "reject",
  },
  {
    case_id: "prior-007",
    summary: "Minor's account data; child consent ground honored without contest",
    grounds: ["child-consent"],
    exemptions: [],
    outcome: "honor",
  },
  {
    case_id: "prior-008",
    summary: "Scraped profile processed unlawfully; claimed research exemption rejected as pretext",
    grounds: ["unlawful-processing"],
    exemptions: ["archiving-research"],
    outcome: "honor",
  },
];

export interface Suggestion {
  prior: PriorCase;
  strength: "strong" | "weak";
}

export function suggest(
  grounds: string[],
  exemptions: string[],
  casebook: readonly PriorCase[] = CASEBOOK,
): Suggestion[] {
  const groundSet = new Set(grounds);
  const exemptionSet = new Set(exemptions);
  const suggestions: Suggestion[] = [];
  for (const prior of casebook) {
    const sharesExemption = prior.exemptions.some((e) => exemptionSet.has(e));
    if (!sharesExemption) continue;
    const sharesGround = prior.grounds.some((g) => groundSet.has(g));
    suggestions.push({ prior, strength: sharesGround ? "strong" : "weak" });
  }
  suggestions.sort((a, b) => {
    if (a.strength !== b.strength) return a.strength === "strong" ? -1 : 1;
    return a.prior.case_id < b.prior.case_id ? -1 : 1;
  });
  return suggestions;
}
