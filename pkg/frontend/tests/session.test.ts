/** Session lifecycle: establish, restore, and the 401 -> login rule. */

import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient, ApiError } from "../src/api.js";
import { SessionState } from "../src/session.js";

class MemoryStorage {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}

test("session persists to storage and restores", () => {
  const storage = new MemoryStorage();
  const first = new SessionState(storage);
  first.establish("tok-9", { username: "dev", role: "developer" });

  const second = new SessionState(storage);
  assert.equal(second.bearerToken, "tok-9");
  assert.equal(second.user?.username, "dev");
  assert.ok(second.canDeploy);
});

test("enduser role cannot deploy", () => {
  const session = new SessionState(null);
  session.establish("tok", { username: "alice", role: "enduser" });
  assert.equal(session.canDeploy, false);
});

test("a 401 clears the session and fires the expiry handler", async () => {
  const storage = new MemoryStorage();
  const session = new SessionState(storage);
  session.establish("expired-token", { username: "dev", role: "developer" });

  let expiredFired = 0;
  session.onExpired(() => {
    expiredFired += 1;
  });

  const api = new ApiClient(session, "", async (request) => {
    assert.equal(request.headers["Authorization"], "Bearer expired-token");
    return {
      status: 401,
      text: async () =>
        JSON.stringify({ error: "Unauthorized", message: "expired", details: null }),
    };
  });

  await assert.rejects(
    () => api.listFunctions(),
    (error: unknown) => error instanceof ApiError && error.status === 401,
  );
  assert.equal(expiredFired, 1);
  assert.equal(session.bearerToken, null);
  assert.equal(session.user, null);
  assert.equal(storage.getItem("qfaas.session"), null);
});

test("logout clears state without firing expiry", () => {
  const session = new SessionState(null);
  let fired = 0;
  session.onExpired(() => {
    fired += 1;
  });
  session.establish("tok", { username: "dev", role: "developer" });
  session.clear();
  assert.equal(fired, 0);
  assert.equal(session.loggedIn, false);
});
