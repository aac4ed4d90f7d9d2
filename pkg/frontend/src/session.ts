/**
 * Session state: bearer token plus the logged-in identity.
 *
 * The token lives in memory and, when available, in sessionStorage so a
 * reload within the tab survives; any 401 from the API clears it and fires
 * the expiry handlers, which route back to the login screen.
 */

import type { Identity } from "./types.js";

const STORAGE_KEY = "qfaas.session";

interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class SessionState {
  private token: string | null = null;
  private identity: Identity | null = null;
  private expiredHandlers: Array<() => void> = [];

  constructor(private storage: StorageLike | null = defaultStorage()) {
    this.restore();
  }

  private restore(): void {
    if (!this.storage) return;
    const raw = this.storage.getItem(STORAGE_KEY);
    if (!raw) return;
    try {
      const doc = JSON.parse(raw) as { token: string; identity: Identity | null };
      this.token = doc.token;
      this.identity = doc.identity;
    } catch {
      this.storage.removeItem(STORAGE_KEY);
    }
  }

  establish(token: string, identity: Identity | null): void {
    this.token = token;
    this.identity = identity;
    this.storage?.setItem(STORAGE_KEY, JSON.stringify({ token, identity }));
  }

  setIdentity(identity: Identity): void {
    this.identity = identity;
    if (this.token) this.establish(this.token, identity);
  }

  clear(): void {
    this.token = null;
    this.identity = null;
    this.storage?.removeItem(STORAGE_KEY);
  }

  /** Called by the API client on any 401. */
  expire(): void {
    const hadToken = this.token !== null;
    this.clear();
    if (hadToken) for (const handler of this.expiredHandlers) handler();
  }

  onExpired(handler: () => void): void {
    this.expiredHandlers.push(handler);
  }

  get bearerToken(): string | null {
    return this.token;
  }

  get user(): Identity | null {
    return this.identity;
  }

  get loggedIn(): boolean {
    return this.token !== null;
  }

  get canDeploy(): boolean {
    return this.identity?.role === "developer" || this.identity?.role === "admin";
  }
}

function defaultStorage(): StorageLike | null {
  try {
    if (typeof sessionStorage !== "undefined") return sessionStorage;
  } catch {
    // sessionStorage can throw in privacy modes; fall back to memory only.
  }
  return null;
}
