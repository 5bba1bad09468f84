/** Browser bootstrap: wires the pure renderers to the DOM.
 *
 * All state lives in ConsoleStore (server responses) plus one form draft.
 * Every click handler re-renders from that state, so nothing on screen can
 * drift from what the API last said. The queue re-polls on an interval to
 * keep countdowns honest against the server clock.
 */

import { ApiClient } from "./api.js";
import type { DecisionFormState } from "./decision.js";
import { emptyForm, toggleExemption, validateDecision } from "./decision.js";
import { suggest } from "./precedent.js";
import {
  renderCase,
  renderDecisionForm,
  renderError,
  renderLint,
  renderQueue,
  renderReceipt,
  renderRevealLog,
} from "./render.js";
import { ConsoleStore } from "./store.js";

const POLL_MS = 15_000;

function element(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in page shell`);
  return node;
}

function configured(name: string, fallback: string): string {
  const meta = document.querySelector(`meta[name="${name}"]`);
  const value = meta?.getAttribute("content");
  return value && value.trim() !== "" ? value.trim() : fallback;
}

export function boot(): void {
  const api = new ApiClient(
    configured("api-base", "http://127.0.0.1:8000"),
    configured("officer-token", "officer-dev-token"),
  );
  const store = new ConsoleStore(api, configured("officer-actor", "officer"));

  const queuePane = element("queue");
  const casePane = element("case");
  const lintPane = element("lint");
  const errorPane = element("errors");

  let form: DecisionFormState = emptyForm();

  function paintQueue(): void {
    if (!store.queue) return;
    queuePane.innerHTML =
      renderQueue(store.queue, store.reveals, store.orderViolation) +
      renderRevealLog(store.reveals);
  }

  function paintCase(): void {
    const opened = store.openedCase;
    if (!opened) {
      casePane.innerHTML = "<p>select a request from the queue</p>";
      return;
    }
    const grounds = opened.request.grounds.map((g) => g.ground);
    const exemptions = opened.request.asserted_exemptions.map((a) => a.exemption);
    const decidable = opened.request.state === "under-review";
    casePane.innerHTML = [
      renderCase(opened, store.reveals),
      decidable
        ? renderDecisionForm(form, validateDecision(form), suggest(grounds, exemptions))
        : "",
      renderReceipt(opened.receipt, opened.residue),
    ].join("\n");
  }

  function paintError(): void {
    errorPane.innerHTML = renderError(store.lastError);
  }

  async function refresh(): Promise<void> {
    try {
      await store.refreshQueue();
      store.lastError = null;
    } catch (error) {
      store.lastError = error instanceof Error ? error.message : String(error);
    }
    paintQueue();
    paintError();
  }

  async function open(requestId: string): Promise<void> {
    form = emptyForm();
    try {
      await store.openCase(requestId);
      store.lastError = null;
    } catch (error) {
      store.lastError = error instanceof Error ? error.message : String(error);
    }
    paintCase();
    paintError();
  }

  document.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (!(target instanceof HTMLElement)) return;
    const action = target.dataset["action"];
    if (action === "open-case") {
      event.preventDefault();
      void open(target.dataset["requestId"] ?? "");
    } else if (action === "reveal") {
      store.reveal(target.dataset["subjectId"] ?? "", target.dataset["requestId"] ?? "");
      paintQueue();
      paintCase();
    } else if (action === "submit-decision") {
      const opened = store.openedCase;
      if (!opened) return;
      void store.submitDecision(opened.request.request_id, form).then((result) => {
        if (result.ok) form = emptyForm();
        paintQueue();
        paintCase();
        paintError();
      });
    } else if (action === "refresh-queue") {
      void refresh();
    } else if (action === "refresh-lint") {
      void store.refreshLint().then(() => {
        lintPane.innerHTML = store.lintReport ? renderLint(store.lintReport) : "";
      });
    }
  });

  // form inputs re-validate on every change so the submit button state
  // always reflects the current draft (reject + empty explanation stays
  // unsubmittable without a round trip)
  document.addEventListener("input", (event) => {
    const target = event.target;
    if (!(target instanceof HTMLInputElement || target instanceof HTMLTextAreaElement)) return;
    if (target.name === "outcome") {
      form = { ...form, outcome: target.value };
    } else if (target.name === "cited") {
      form = toggleExemption(form, target.value);
    } else if (target.name === "explanation") {
      form = { ...form, explanation: target.value };
    } else {
      return;
    }
    paintCase();
    const textarea = casePane.querySelector<HTMLTextAreaElement>("textarea[name=explanation]");
    if (textarea && target.name === "explanation") {
      textarea.focus();
      textarea.setSelectionRange(textarea.value.length, textarea.value.length);
    }
  });

  void refresh();
  void store.refreshLint().then(() => {
    lintPane.innerHTML = store.lintReport ? renderLint(store.lintReport) : "";
  });
  setInterval(() => void refresh(), POLL_MS);
}

boot();
