/**
 * Typed client for the gateway API.
 *
 * Every method maps to exactly one documented endpoint and sends the
 * documented body shape, nothing more; the contract tests replay this
 * client against a recording transport and diff the traffic against the
 * schema. A 401 anywhere expires the session.
 */
export class ApiError extends Error {
    constructor(status, code, message, details = null) {
        super(message);
        this.status = status;
        this.code = code;
        this.details = details;
    }
}
const fetchTransport = async (request) => {
    const response = await fetch(request.url, {
        method: request.method,
        headers: request.headers,
        body: request.body,
    });
    return { status: response.status, text: () => response.text() };
};
export class ApiClient {
    constructor(session, baseUrl = "", transport = fetchTransport) {
        this.session = session;
        this.baseUrl = baseUrl;
        this.transport = transport;
    }
    async request(method, path, body, auth = true) {
        const headers = {};
        if (body !== undefined)
            headers["Content-Type"] = "application/json";
        if (auth) {
            const token = this.session.bearerToken;
            if (token)
                headers["Authorization"] = `Bearer ${token}`;
        }
        const response = await this.transport({
            method,
            url: this.baseUrl + path,
            headers,
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (response.status === 401) {
            this.session.expire();
        }
        const text = await response.text();
        const parsed = text ? safeJson(text) : null;
        if (response.status >= 400) {
            const envelope = (parsed ?? {});
            throw new ApiError(response.status, envelope.error ?? "Error", envelope.message ?? `request failed with status ${response.status}`, envelope.details ?? null);
        }
        return parsed;
    }
    async login(username, password) {
        return this.request("POST", "/api/auth/login", { username, password }, false);
    }
    async me() {
        return this.request("GET", "/api/me");
    }
    async listFunctions() {
        const doc = await this.request("GET", "/api/functions");
        return doc.functions;
    }
    async getFunction(identifier) {
        return this.request("GET", `/api/functions/${identifier}`);
    }
    async createFunction(body) {
        return this.request("POST", "/api/functions", body);
    }
    async updateFunction(identifier, body) {
        return this.request("PUT", `/api/functions/${identifier}`, body);
    }
    async deleteFunction(identifier) {
        await this.request("DELETE", `/api/functions/${identifier}`);
    }
    async deployments(identifier) {
        const doc = await this.request("GET", `/api/functions/${identifier}/deployments`);
        return doc.deployments;
    }
    async invoke(identifier, body) {
        return this.request("POST", `/api/function/${identifier}`, body);
    }
    async getJob(jobId) {
        return this.request("GET", `/api/job/${jobId}`);
    }
    async listJobs(params = {}) {
        const query = new URLSearchParams();
        if (params.status)
            query.set("status", params.status);
        if (params.function)
            query.set("function", params.function);
        if (params.offset !== undefined)
            query.set("offset", String(params.offset));
        if (params.limit !== undefined)
            query.set("limit", String(params.limit));
        const suffix = query.toString() ? `?${query.toString()}` : "";
        return this.request("GET", `/api/jobs${suffix}`);
    }
    async backends() {
        const doc = await this.request("GET", "/api/backends");
        return doc.backends;
    }
}
function safeJson(text) {
    try {
        return JSON.parse(text);
    }
    catch {
        return null;
    }
}
/** Serialize the invoke form into the exact request schema (no extras). */
export function buildInvokeBody(form) {
    const body = {
        shots: form.shots,
        waitForResult: form.waitForResult,
        autoSelect: form.backendName ? false : form.autoSelect,
    };
    if (form.input !== null && form.input !== undefined && form.input !== "") {
        body.input = form.input;
    }
    if (form.provider)
        body.provider = form.provider;
    if (form.backendType)
        body.backendType = form.backendType;
    if (form.backendName)
        body.backendName = form.backendName;
    if (form.seed !== null && form.seed !== undefined)
        body.seed = form.seed;
    return body;
}
/** Base64 helpers for fnCode blobs (UTF-8 safe). */
export function encodeBase64(text) {
    const bytes = new TextEncoder().encode(text);
    let binary = "";
    for (const b of bytes)
        binary += String.fromCharCode(b);
    return btoa(binary);
}
export function decodeBase64(blob) {
    if (!blob)
        return "";
    const binary = atob(blob);
    const bytes = Uint8Array.from(binary, (ch) => ch.charCodeAt(0));
    return new TextDecoder().decode(bytes);
}
export function makeFnCode(handler, requirements) {
    return {
        requirements: encodeBase64(requirements),
        handlerPy: encodeBase64(handler),
        handlerQs: "",
    };
}
