/**
 * Session state: bearer token plus the logged-in identity.
 *
 * The token lives in memory and, when available, in sessionStorage so a
 * reload within the tab survives; any 401 from the API clears it and fires
 * the expiry handlers, which route back to the login screen.
 */
const STORAGE_KEY = "qfaas.session";
export class SessionState {
    constructor(storage = defaultStorage()) {
        this.storage = storage;
        this.token = null;
        this.identity = null;
        this.expiredHandlers = [];
        this.restore();
    }
    restore() {
        if (!this.storage)
            return;
        const raw = this.storage.getItem(STORAGE_KEY);
        if (!raw)
            return;
        try {
            const doc = JSON.parse(raw);
            this.token = doc.token;
            this.identity = doc.identity;
        }
        catch {
            this.storage.removeItem(STORAGE_KEY);
        }
    }
    establish(token, identity) {
        this.token = token;
        this.identity = identity;
        this.storage?.setItem(STORAGE_KEY, JSON.stringify({ token, identity }));
    }
    setIdentity(identity) {
        this.identity = identity;
        if (this.token)
            this.establish(this.token, identity);
    }
    clear() {
        this.token = null;
        this.identity = null;
        this.storage?.removeItem(STORAGE_KEY);
    }
    /** Called by the API client on any 401. */
    expire() {
        const hadToken = this.token !== null;
        this.clear();
        if (hadToken)
            for (const handler of this.expiredHandlers)
                handler();
    }
    onExpired(handler) {
        this.expiredHandlers.push(handler);
    }
    get bearerToken() {
        return this.token;
    }
    get user() {
        return this.identity;
    }
    get loggedIn() {
        return this.token !== null;
    }
    get canDeploy() {
        return this.identity?.role === "developer" || this.identity?.role === "admin";
    }
}
function defaultStorage() {
    try {
        if (typeof sessionStorage !== "undefined")
            return sessionStorage;
    }
    catch {
        // sessionStorage can throw in privacy modes; fall back to memory only.
    }
    return null;
}
