/** Console state container.
 *
 * Holds nothing authoritative: every field is the latest server response,
 * and every mutation is a POST followed by fresh GETs. Reloading the page
 * reproduces any view from API data alone. Server errors are kept verbatim
 * so the UI can show exactly what the service said.
 */

import { ApiClient, ApiError } from "./api.js";
import type { LintPayload, ReceiptPayload, RequestView, ResiduePayload } from "./model.js";
import type { DecisionFormState, FormProblem } from "./decision.js";
import { toSubmission, validateDecision } from "./decision.js";
import type { QueueView } from "./queue.js";
import { buildQueueView, verifyDeadlineOrder } from "./queue.js";
import { RevealLog } from "./pseudonym.js";

export interface CaseView {
  request: RequestView;
  receipt: ReceiptPayload | null;
  residue: ResiduePayload | null;
}

export interface SubmitResult {
  ok: boolean;
  problems: FormProblem[];
  serverError: string | null;
}

export class ConsoleStore {
  queue: QueueView | null = null;
  orderViolation = false;
  openedCase: CaseView | null = null;
  lintReport: LintPayload | null = null;
  lastError: string | null = null;
  readonly reveals = new RevealLog();

  constructor(
    private readonly api: ApiClient,
    readonly actor: string,
  ) {}

  async refreshQueue(): Promise<QueueView> {
    const listing = await this.api.escalatedQueue();
    const view = buildQueueView(listing);
    this.queue = view;
    this.orderViolation = !verifyDeadlineOrder(view.rows);
    return view;
  }

  async openCase(requestId: string): Promise<CaseView> {
    const request = await this.api.getRequest(requestId);
    // the receipt only exists once execution has started (404 before then);
    // the residue report is a live scan valid in any state
    const receipt = await this.tryFetch(() => this.api.receipt(requestId));
    const residue = await this.tryFetch(() => this.api.residue(requestId));
    const view: CaseView = { request, receipt, residue };
    this.openedCase = view;
    return view;
  }

  private async tryFetch<T>(call: () => Promise<T>): Promise<T | null> {
    try {
      return await call();
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) return null;
      throw error;
    }
  }

  /** Validate, submit, then re-read both the case and the queue so the
   * transition on screen is the server's view, not an optimistic guess. */
  async submitDecision(requestId: string, form: DecisionFormState): Promise<SubmitResult> {
    const problems = validateDecision(form);
    if (problems.length > 0) {
      return { ok: false, problems, serverError: null };
    }
    try {
      await this.api.decide(requestId, toSubmission(form, this.actor));
    } catch (error) {
      if (error instanceof ApiError) {
        this.lastError = error.detail;
        return { ok: false, problems: [], serverError: error.detail };
      }
      throw error;
    }
    this.lastError = null;
    await this.openCase(requestId);
    await this.refreshQueue();
    return { ok: true, problems: [], serverError: null };
  }

  async refreshLint(): Promise<LintPayload> {
    const report = await this.api.lint();
    this.lintReport = report;
    return report;
  }

  /** Unmask one subject for the session; the reveal itself is recorded. */
  reveal(subjectId: string, requestId: string): void {
    const at = this.queue ? this.queue.server_time : 0;
    this.reveals.reveal(subjectId, requestId, at);
  }

  labelFor(subjectId: string): string {
    return this.reveals.labelFor(subjectId);
  }
}
