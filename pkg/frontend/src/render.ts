/** HTML renderers.
 *
 * Every function here maps data to a markup string and touches no DOM, so
 * the whole layer is testable without a browser. main.ts assigns the
 * strings to innerHTML and wires events by delegation on data-action
 * attributes. All interpolated values pass through escapeHtml.
 */

import type { DecisionFormState, FormProblem } from "./decision.js";
import { canSubmit } from "./decision.js";
import type { LintPayload, ReceiptPayload, RequestView, ResiduePayload } from "./model.js";
import { EXEMPTIONS, OUTCOMES } from "./model.js";
import type { Suggestion } from "./precedent.js";
import type { RevealLog } from "./pseudonym.js";
import type { QueueRow, QueueView } from "./queue.js";
import { formatDays } from "./queue.js";
import type { CaseView } from "./store.js";

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function row(cells: string[]): string {
  return `<tr>${cells.map((c) => `<td>${c}</td>`).join("")}</tr>`;
}

export function renderQueue(view: QueueView, reveals: RevealLog, orderViolation: boolean): string {
  const header =
    "<tr><th>request</th><th>subject</th><th>grounds</th>" +
    "<th>asserted exemptions</th><th>deadline</th><th></th></tr>";
  const rows = view.rows.map((r) => renderQueueRow(r, reveals)).join("\n");
  const warning = orderViolation
    ? '<p class="warning">server listing is not in deadline order</p>'
    : "";
  const empty = view.rows.length === 0 ? "<p>no escalated requests waiting</p>" : "";
  return [
    `<h2>escalated queue</h2>`,
    warning,
    `<table class="queue">${header}${rows}</table>`,
    empty,
  ].join("\n");
}

function renderQueueRow(r: QueueRow, reveals: RevealLog): string {
  const label = reveals.labelFor(r.subject_id);
  const revealCell = reveals.isRevealed(r.subject_id)
    ? ""
    : `<button data-action="reveal" data-subject-id="${escapeHtml(r.subject_id)}"` +
      ` data-request-id="${escapeHtml(r.request_id)}">reveal</button>`;
  const deadlineClass = r.overdue ? "overdue" : "pending";
  return row([
    `<a href="#" data-action="open-case" data-request-id="${escapeHtml(r.request_id)}">` +
      `${escapeHtml(r.request_id)}</a>`,
    escapeHtml(label),
    r.grounds.map(escapeHtml).join(", "),
    r.exemptions.map(escapeHtml).join("; "),
    `<span class="${deadlineClass}">${escapeHtml(formatDays(r.days_remaining))}</span>`,
    revealCell,
  ]);
}

export function renderCase(view: CaseView, reveals: RevealLog): string {
  const r = view.request;
  const grounds = r.grounds
    .map((g) => `<li>${escapeHtml(g.ground)}</li>`)
    .join("");
  const assertions = r.asserted_exemptions
    .map(
      (a) =>
        `<li><strong>${escapeHtml(a.exemption)}</strong> (${escapeHtml(a.certainty)})` +
        ` by ${escapeHtml(a.asserted_by)}: ${escapeHtml(a.rationale)}</li>`,
    )
    .join("");
  const history = r.state_history
    .map(([state]) => escapeHtml(state))
    .join(" &rarr; ");
  const decision = r.decision
    ? `<p>decision: <strong>${escapeHtml(r.decision.outcome)}</strong>` +
      ` &mdash; ${escapeHtml(r.decision.explanation)}</p>`
    : "";
  return [
    `<h2>${escapeHtml(r.request_id)}</h2>`,
    `<p>subject: ${escapeHtml(reveals.labelFor(r.subject_id))}</p>`,
    `<p>state: <strong data-field="state">${escapeHtml(r.state)}</strong></p>`,
    `<p>history: ${history}</p>`,
    `<h3>claimed grounds</h3><ul>${grounds}</ul>`,
    `<h3>asserted exemptions</h3><ul>${assertions || "<li>none</li>"}</ul>`,
    decision,
  ].join("\n");
}

export function renderDecisionForm(
  form: DecisionFormState,
  problems: FormProblem[],
  suggestions: Suggestion[],
): string {
  const outcomes = OUTCOMES.map(
    (o) =>
      `<label><input type="radio" name="outcome" value="${o}"` +
      `${form.outcome === o ? " checked" : ""}> ${o}</label>`,
  ).join("\n");
  const checklist = EXEMPTIONS.map(
    (e) =>
      `<label><input type="checkbox" name="cited" value="${e}"` +
      `${form.cited_exemptions.includes(e) ? " checked" : ""}> ${e}</label>`,
  ).join("\n");
  const problemList = problems
    .map((p) => `<li class="problem">${escapeHtml(p.message)}</li>`)
    .join("");
  const disabled = canSubmit(form) ? "" : " disabled";
  return [
    `<h3>decision</h3>`,
    `<fieldset data-field="outcome">${outcomes}</fieldset>`,
    `<fieldset data-field="cited">${checklist}</fieldset>`,
    `<textarea name="explanation" placeholder="explanation">` +
      `${escapeHtml(form.explanation)}</textarea>`,
    problems.length > 0 ? `<ul class="problems">${problemList}</ul>` : "",
    `<button data-action="submit-decision"${disabled}>submit decision</button>`,
    renderSuggestions(suggestions),
  ].join("\n");
}

export function renderSuggestions(suggestions: Suggestion[]): string {
  if (suggestions.length === 0) {
    return `<div class="precedents"><h4>precedents</h4><p>no prior cases match</p></div>`;
  }
  const items = suggestions
    .map(
      (s) =>
        `<li class="${s.strength}">[${s.strength}] ${escapeHtml(s.prior.case_id)}: ` +
        `${escapeHtml(s.prior.summary)} &rarr; ${escapeHtml(s.prior.outcome)}</li>`,
    )
    .join("");
  return `<div class="precedents"><h4>precedents</h4><ul>${items}</ul></div>`;
}

export function renderReceipt(receipt: ReceiptPayload | null, residue: ResiduePayload | null): string {
  if (receipt === null) {
    return "<p>no erasure receipt yet; the request has not reached execution</p>";
  }
  const steps = receipt.steps
    .map(
      (s) =>
        `<li class="${s.state}">${escapeHtml(s.side)}/${escapeHtml(s.step)}: ` +
        `${escapeHtml(s.state)}${s.detail ? ` (${escapeHtml(s.detail)})` : ""}</li>`,
    )
    .join("");
  const done = receipt.all_done
    ? '<span class="done">all steps done</span>'
    : '<span class="pending">steps pending</span>';
  return [
    `<h3>erasure receipt ${escapeHtml(receipt.receipt_id)}</h3>`,
    `<p>${receipt.doc_ids.length} documents, ${done}</p>`,
    `<ol class="steps">${steps}</ol>`,
    renderResidue(residue),
  ].join("\n");
}

export function renderResidue(residue: ResiduePayload | null): string {
  if (residue === null) {
    return "<p>no residue report yet</p>";
  }
  if (residue.clean) {
    return (
      `<p class="residue-clean">residue: <strong>empty</strong> ` +
      `(${residue.tokens_checked} tokens over ${residue.scanned_files} files)</p>`
    );
  }
  const matches = residue.matches
    .map(
      (m) =>
        `<li>${escapeHtml(m.surface)} at ${escapeHtml(m.location)}</li>`,
    )
    .join("");
  return `<p class="residue-dirty">residue found:</p><ul>${matches}</ul>`;
}

export function renderLint(report: LintPayload): string {
  if (report.findings.length === 0) {
    return "<h2>configuration lint</h2><p>no findings</p>";
  }
  const items = report.findings
    .map(
      (f) =>
        `<li class="${escapeHtml(f.severity)}">AP${f.pattern_id} [${escapeHtml(f.severity)}] ` +
        `${escapeHtml(f.location)}: ${escapeHtml(f.message)}</li>`,
    )
    .join("");
  return `<h2>configuration lint</h2><ul class="lint">${items}</ul>`;
}

export function renderRevealLog(reveals: RevealLog): string {
  const entries = reveals.log();
  if (entries.length === 0) return "";
  const items = entries
    .map(
      (e) =>
        `<li>${escapeHtml(e.subject_id)} revealed on ${escapeHtml(e.request_id)}</li>`,
    )
    .join("");
  return `<details class="reveal-log"><summary>${entries.length} reveal(s) this session</summary>` +
    `<ul>${items}</ul></details>`;
}

export function renderError(message: string | null): string {
  if (!message) return "";
  // shown verbatim (escaped), exactly as the server phrased it
  return `<p class="server-error" role="alert">${escapeHtml(message)}</p>`;
}

export function renderRequestSummary(r: RequestView): string {
  return `<p>${escapeHtml(r.request_id)} is ${escapeHtml(r.state)}</p>`;
}
