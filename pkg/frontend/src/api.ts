/** Typed client for the erasure-request API.
 *
 * Every method is a single documented endpoint; nothing here caches or
 * reorders. Server errors come back as ApiError with the server's own
 * detail string, so callers can show them verbatim.
 */

import type {
  Decision,
  LintPayload,
  ListingPayload,
  ReceiptPayload,
  RequestView,
  ResiduePayload,
  ViolationsPayload,
} from "./model.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly body: Record<string, unknown> = {},
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface DecisionSubmission {
  outcome: string;
  explanation: string;
  cited_exemptions: string[];
  escalation_reason?: string;
  actor: string;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly officerToken: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = {
      "Content-Type": "application/json",
    };
    if (this.officerToken) {
      headers["Authorization"] = `Bearer ${this.officerToken}`;
    }
    return headers;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
      const detail =
        typeof payload["detail"] === "string"
          ? payload["detail"]
          : response.statusText;
      throw new ApiError(response.status, detail, payload);
    }
    return payload as T;
  }

  listRequests(state?: string, sort?: string): Promise<ListingPayload> {
    const params = new URLSearchParams();
    if (state) params.set("state", state);
    if (sort) params.set("sort", sort);
    const query = params.toString();
    return this.request<ListingPayload>(
      "GET",
      `/requests${query ? `?${query}` : ""}`,
    );
  }

  /** The officer queue: the server sorts by nearest deadline first. */
  escalatedQueue(): Promise<ListingPayload> {
    return this.listRequests("escalated", "deadline");
  }

  getRequest(requestId: string): Promise<RequestView> {
    return this.request<RequestView>("GET", `/requests/${requestId}`);
  }

  decide(
    requestId: string,
    submission: DecisionSubmission,
  ): Promise<{ request_id: string; state: string }> {
    return this.request("POST", `/requests/${requestId}/decision`, submission);
  }

  receipt(requestId: string): Promise<ReceiptPayload> {
    return this.request<ReceiptPayload>(
      "GET",
      `/requests/${requestId}/receipt`,
    );
  }

  residue(requestId: string): Promise<ResiduePayload> {
    return this.request<ResiduePayload>(
      "GET",
      `/requests/${requestId}/residue`,
    );
  }

  lint(): Promise<LintPayload> {
    return this.request<LintPayload>("GET", "/lint");
  }

  violations(): Promise<ViolationsPayload> {
    return this.request<ViolationsPayload>("GET", "/compliance/violations");
  }

  submit(body: {
    subject_id: string;
    selector: string;
    grounds: { ground: string; facts: Record<string, unknown> }[];
    credentials: Record<string, unknown>;
  }): Promise<RequestView> {
    return this.request<RequestView>("POST", "/requests", body);
  }
}

export function decisionBody(decision: Decision, actor: string): DecisionSubmission {
  return {
    outcome: decision.outcome,
    explanation: decision.explanation,
    cited_exemptions: decision.cited_exemptions,
    escalation_reason: decision.escalation_reason,
    actor,
  };
}
