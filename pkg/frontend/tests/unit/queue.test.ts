import { strict as assert } from "node:assert";
import { test } from "node:test";

import type { ListingPayload, RequestView } from "../../src/model.js";
import { SECONDS_PER_DAY } from "../../src/model.js";
import {
  buildQueueView,
  daysRemaining,
  formatDays,
  verifyDeadlineOrder,
} from "../../src/queue.js";

function requestFixture(overrides: Partial<RequestView>): RequestView {
  return {
    request_id: "req-000001",
    subject_id: "amelie",
    selector: { subject_id: "amelie" },
    grounds: [{ ground: "objection", facts: {} }],
    received_at: 1000,
    state: "under-review",
    acknowledged_at: 1100,
    extension_notice_at: null,
    decision: null,
    receipt_id: null,
    response: null,
    escalated: true,
    parked_no_source: false,
    state_history: [["received", 1000]],
    deadline_at: 1000 + 30 * SECONDS_PER_DAY,
    asserted_exemptions: [
      {
        exemption: "freedom-of-expression",
        asserted_by: "editor",
        rationale: "published reporting",
        certainty: "ambiguous",
      },
    ],
    ...overrides,
  };
}

test("rows come out in exactly the order the server sent", () => {
  const listing: ListingPayload = {
    server_time: 1000,
    requests: [
      requestFixture({ request_id: "req-000003", deadline_at: 5000 }),
      requestFixture({ request_id: "req-000001", deadline_at: 9000 }),
      requestFixture({ request_id: "req-000002", deadline_at: 7000 }),
    ],
  };
  const view = buildQueueView(listing);
  assert.deepEqual(
    view.rows.map((r) => r.request_id),
    ["req-000003", "req-000001", "req-000002"],
  );
  // the client notices the bad ordering but does not repair it
  assert.equal(verifyDeadlineOrder(view.rows), false);
});

test("verifyDeadlineOrder accepts ascending deadlines and ties", () => {
  const listing: ListingPayload = {
    server_time: 1000,
    requests: [
      requestFixture({ request_id: "a", deadline_at: 5000 }),
      requestFixture({ request_id: "b", deadline_at: 5000 }),
      requestFixture({ request_id: "c", deadline_at: 6000 }),
    ],
  };
  assert.equal(verifyDeadlineOrder(buildQueueView(listing).rows), true);
});

test("countdown uses the listing's server_time, not the wall clock", () => {
  const deadline = 2_000_000_000;
  const serverTime = deadline - 3 * SECONDS_PER_DAY;
  const listing: ListingPayload = {
    server_time: serverTime,
    requests: [requestFixture({ deadline_at: deadline })],
  };
  const view = buildQueueView(listing);
  const first = view.rows[0];
  assert.ok(first);
  assert.equal(first.days_remaining, 3);
  assert.equal(first.overdue, false);
  // independent of Date.now(): same result no matter when it runs
  assert.equal(daysRemaining(deadline, serverTime), 3);
});

test("row carries pseudonym, grounds, and formatted exemptions", () => {
  const listing: ListingPayload = {
    server_time: 1000,
    requests: [requestFixture({})],
  };
  const first = buildQueueView(listing).rows[0];
  assert.ok(first);
  assert.notEqual(first.subject_label, "amelie");
  assert.deepEqual(first.grounds, ["objection"]);
  assert.deepEqual(first.exemptions, ["freedom-of-expression (ambiguous)"]);
});

test("past-deadline rows are flagged overdue", () => {
  const listing: ListingPayload = {
    server_time: 10_000 + SECONDS_PER_DAY,
    requests: [requestFixture({ deadline_at: 10_000 })],
  };
  const first = buildQueueView(listing).rows[0];
  assert.ok(first);
  assert.equal(first.overdue, true);
  assert.equal(formatDays(first.days_remaining), "1.0d overdue");
  assert.equal(formatDays(2.5), "2.5d left");
});
