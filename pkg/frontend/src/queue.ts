/** Queue view assembly.
 *
 * The server's ordering is the ordering: rows are derived in the sequence
 * the listing returned them, and deadline math uses the listing's own
 * server_time, never the browser clock. verifyDeadlineOrder exists so the
 * client can notice, not repair, a server that violates its sort contract.
 */

import type { ListingPayload, RequestView } from "./model.js";
import { SECONDS_PER_DAY } from "./model.js";
import { pseudonymize } from "./pseudonym.js";

export interface QueueRow {
  request_id: string;
  subject_label: string;
  subject_id: string;
  grounds: string[];
  exemptions: string[];
  deadline_at: number;
  days_remaining: number;
  overdue: boolean;
}

export interface QueueView {
  server_time: number;
  rows: QueueRow[];
}

export function daysRemaining(deadlineAt: number, serverTime: number): number {
  return (deadlineAt - serverTime) / SECONDS_PER_DAY;
}

export function buildRow(request: RequestView, serverTime: number): QueueRow {
  const remaining = daysRemaining(request.deadline_at, serverTime);
  return {
    request_id: request.request_id,
    subject_label: pseudonymize(request.subject_id),
    subject_id: request.subject_id,
    grounds: request.grounds.map((c) => c.ground),
    exemptions: request.asserted_exemptions.map(
      (a) => `${a.exemption} (${a.certainty})`,
    ),
    deadline_at: request.deadline_at,
    days_remaining: remaining,
    overdue: remaining < 0,
  };
}

export function buildQueueView(listing: ListingPayload): QueueView {
  return {
    server_time: listing.server_time,
    rows: listing.requests.map((r) => buildRow(r, listing.server_time)),
  };
}

/** True when rows run nearest-deadline first, as the API promises. */
export function verifyDeadlineOrder(rows: readonly QueueRow[]): boolean {
  for (let i = 1; i < rows.length; i++) {
    const prev = rows[i - 1];
    const here = rows[i];
    if (prev !== undefined && here !== undefined &&
        prev.deadline_at > here.deadline_at) {
      return false;
    }
  }
  return true;
}

export function formatDays(days: number): string {
  if (days < 0) return `${Math.abs(days).toFixed(1)}d overdue`;
  return `${days.toFixed(1)}d left`;
}
