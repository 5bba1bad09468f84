/** Wire types for the erasure-request API, mirrored field for field. */

export interface GroundClaim {
  ground: string;
  facts: Record<string, unknown>;
}

export interface ExemptionAssertion {
  exemption: string;
  asserted_by: string;
  rationale: string;
  certainty: "clear" | "ambiguous";
}

export interface Decision {
  outcome: string;
  explanation: string;
  cited_exemptions: string[];
  failed_grounds: string[];
  escalation_reason: string;
}

export interface ResponseMessage {
  kind: string;
  text: string;
  issued_at: number;
}

export interface RequestView {
  request_id: string;
  subject_id: string;
  selector: Record<string, unknown>;
  grounds: GroundClaim[];
  received_at: number;
  state: string;
  acknowledged_at: number | null;
  extension_notice_at: number | null;
  decision: Decision | null;
  receipt_id: string | null;
  response: ResponseMessage | null;
  escalated: boolean;
  parked_no_source: boolean;
  state_history: [string, number][];
  deadline_at: number;
  asserted_exemptions: ExemptionAssertion[];
}

export interface ListingPayload {
  server_time: number;
  requests: RequestView[];
}

export interface StepStatus {
  step: string;
  side: string;
  state: string;
  finished_at: number | null;
  detail: string;
}

export interface ReceiptPayload {
  receipt_id: string;
  selector: string;
  doc_ids: string[];
  deadline_seconds: number;
  started_at: number;
  steps: StepStatus[];
  all_done: boolean;
}

export interface ResidueMatchPayload {
  surface: string;
  location: string;
  token: string;
}

export interface ResiduePayload {
  selector: string;
  tokens_checked: number;
  matches: ResidueMatchPayload[];
  scanned_files: number;
  scanned_bytes: number;
  clean: boolean;
}

export interface LintFinding {
  pattern_id: number;
  severity: string;
  location: string;
  message: string;
}

export interface LintPayload {
  config: string | null;
  findings: LintFinding[];
}

export interface ViolationsPayload {
  server_time: number;
  violations: Record<string, unknown>[];
}

/** The five erasure carve-outs an officer can cite. */
export const EXEMPTIONS = [
  "freedom-of-expression",
  "legal-obligation-or-public-task",
  "public-health",
  "archiving-research",
  "legal-claims",
] as const;

export const OUTCOMES = ["honor", "reject"] as const;

export const SECONDS_PER_DAY = 86_400;
