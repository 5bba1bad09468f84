/** Decision form state and validation.
 *
 * The one rule the form must enforce client-side: a rejection without an
 * explanation is unsubmittable. The server enforces the same thing (422),
 * so this is a mirror, not the authority; the form just refuses to send
 * what the server would bounce.
 */

import type { DecisionSubmission } from "./api.js";
import { EXEMPTIONS, OUTCOMES } from "./model.js";

export interface DecisionFormState {
  outcome: string;
  explanation: string;
  cited_exemptions: string[];
  escalation_reason: string;
}

export function emptyForm(): DecisionFormState {
  return { outcome: "honor", explanation: "", cited_exemptions: [], escalation_reason: "" };
}

export interface FormProblem {
  field: "outcome" | "explanation" | "cited_exemptions";
  message: string;
}

export function validateDecision(form: DecisionFormState): FormProblem[] {
  const problems: FormProblem[] = [];
  if (!(OUTCOMES as readonly string[]).includes(form.outcome)) {
    problems.push({ field: "outcome", message: `outcome must be one of: ${OUTCOMES.join(", ")}` });
  }
  if (form.outcome === "reject" && form.explanation.trim() === "") {
    problems.push({
      field: "explanation",
      message: "a rejection needs an explanation before it can be submitted",
    });
  }
  for (const exemption of form.cited_exemptions) {
    if (!(EXEMPTIONS as readonly string[]).includes(exemption)) {
      problems.push({ field: "cited_exemptions", message: `unknown exemption: ${exemption}` });
    }
  }
  if (form.outcome === "reject" && form.explanation.trim() !== "" && form.cited_exemptions.length === 0) {
    // allowed by the API (a rejection can rest on failed grounds alone),
    // so this is a soft nudge rather than a blocker
  }
  return problems;
}

export function canSubmit(form: DecisionFormState): boolean {
  return validateDecision(form).length === 0;
}

export function toSubmission(form: DecisionFormState, actor: string): DecisionSubmission {
  const body: DecisionSubmission = {
    outcome: form.outcome,
    explanation: form.explanation.trim(),
    cited_exemptions: [...form.cited_exemptions],
    actor,
  };
  if (form.escalation_reason.trim() !== "") {
    body.escalation_reason = form.escalation_reason.trim();
  }
  return body;
}

export function toggleExemption(form: DecisionFormState, exemption: string): DecisionFormState {
  const cited = form.cited_exemptions.includes(exemption)
    ? form.cited_exemptions.filter((e) => e !== exemption)
    : [...form.cited_exemptions, exemption];
  return { ...form, cited_exemptions: cited };
}
