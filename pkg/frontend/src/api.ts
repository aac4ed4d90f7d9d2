/**
 * Typed client for the gateway API.
 *
 * Every method maps to exactly one documented endpoint and sends the
 * documented body shape, nothing more; the contract tests replay this
 * client against a recording transport and diff the traffic against the
 * schema. A 401 anywhere expires the session.
 */

import { SessionState } from "./session.js";
import type {
  BackendRow,
  CreateFunctionBody,
  DeploymentRecord,
  ErrorEnvelope,
  FnCode,
  FunctionDetail,
  FunctionListItem,
  Identity,
  InvokeForm,
  InvokeRequestBody,
  InvokeResponse,
  JobPage,
  JobRow,
  LoginResponse,
  UpdateFunctionBody,
} from "./types.js";

export interface TransportRequest {
  method: string;
  url: string;
  headers: Record<string, string>;
  body?: string;
}

export interface TransportResponse {
  status: number;
  text(): Promise<string>;
}

export type Transport = (request: TransportRequest) => Promise<TransportResponse>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: unknown = null,
  ) {
    super(message);
  }
}

const fetchTransport: Transport = async (request) => {
  const response = await fetch(request.url, {
    method: request.method,
    headers: request.headers,
    body: request.body,
  });
  return { status: response.status, text: () => response.text() };
};

export class ApiClient {
  constructor(
    public session: SessionState,
    private baseUrl: string = "",
    private transport: Transport = fetchTransport,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    auth = true,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (auth) {
      const token = this.session.bearerToken;
      if (token) headers["Authorization"] = `Bearer ${token}`;
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
      const envelope = (parsed ?? {}) as Partial<ErrorEnvelope>;
      throw new ApiError(
        response.status,
        envelope.error ?? "Error",
        envelope.message ?? `request failed with status ${response.status}`,
        envelope.details ?? null,
      );
    }
    return parsed as T;
  }

  async login(username: string, password: string): Promise<LoginResponse> {
    return this.request<LoginResponse>(
      "POST",
      "/api/auth/login",
      { username, password },
      false,
    );
  }

  async me(): Promise<Identity> {
    return this.request<Identity>("GET", "/api/me");
  }

  async listFunctions(): Promise<FunctionListItem[]> {
    const doc = await this.request<{ functions: FunctionListItem[] }>(
      "GET",
      "/api/functions",
    );
    return doc.functions;
  }

  async getFunction(identifier: string): Promise<FunctionDetail> {
    return this.request<FunctionDetail>("GET", `/api/functions/${identifier}`);
  }

  async createFunction(body: CreateFunctionBody): Promise<{
    function: FunctionListItem;
    deployment: DeploymentRecord | null;
  }> {
    return this.request("POST", "/api/functions", body);
  }

  async updateFunction(
    identifier: string,
    body: UpdateFunctionBody,
  ): Promise<FunctionListItem> {
    return this.request("PUT", `/api/functions/${identifier}`, body);
  }

  async deleteFunction(identifier: string): Promise<void> {
    await this.request("DELETE", `/api/functions/${identifier}`);
  }

  async deployments(identifier: string): Promise<DeploymentRecord[]> {
    const doc = await this.request<{ deployments: DeploymentRecord[] }>(
      "GET",
      `/api/functions/${identifier}/deployments`,
    );
    return doc.deployments;
  }

  async invoke(identifier: string, body: InvokeRequestBody): Promise<InvokeResponse> {
    return this.request("POST", `/api/function/${identifier}`, body);
  }

  async getJob(jobId: string): Promise<JobRow> {
    return this.request("GET", `/api/job/${jobId}`);
  }

  async listJobs(params: {
    status?: string;
    function?: string;
    offset?: number;
    limit?: number;
  } = {}): Promise<JobPage> {
    const query = new URLSearchParams();
    if (params.status) query.set("status", params.status);
    if (params.function) query.set("function", params.function);
    if (params.offset !== undefined) query.set("offset", String(params.offset));
    if (params.limit !== undefined) query.set("limit", String(params.limit));
    const suffix = query.toString() ? `?${query.toString()}` : "";
    return this.request("GET", `/api/jobs${suffix}`);
  }

  async backends(): Promise<BackendRow[]> {
    const doc = await this.request<{ backends: BackendRow[] }>("GET", "/api/backends");
    return doc.backends;
  }
}

function safeJson(text: string): unknown {
  try {
    return JSON.parse(text);
  } catch {
    return null;
  }
}

/** Serialize the invoke form into the exact request schema (no extras). */
export function buildInvokeBody(form: InvokeForm): InvokeRequestBody {
  const body: InvokeRequestBody = {
    shots: form.shots,
    waitForResult: form.waitForResult,
    autoSelect: form.backendName ? false : form.autoSelect,
  };
  if (form.input !== null && form.input !== undefined && form.input !== "") {
    body.input = form.input;
  }
  if (form.provider) body.provider = form.provider;
  if (form.backendType) body.backendType = form.backendType;
  if (form.backendName) body.backendName = form.backendName;
  if (form.seed !== null && form.seed !== undefined) body.seed = form.seed;
  return body;
}

/** Base64 helpers for fnCode blobs (UTF-8 safe). */
export function encodeBase64(text: string): string {
  const bytes = new TextEncoder().encode(text);
  let binary = "";
  for (const b of bytes) binary += String.fromCharCode(b);
  return btoa(binary);
}

export function decodeBase64(blob: string): string {
  if (!blob) return "";
  const binary = atob(blob);
  const bytes = Uint8Array.from(binary, (ch) => ch.charCodeAt(0));
  return new TextDecoder().decode(bytes);
}

export function makeFnCode(handler: string, requirements: string): FnCode {
  return {
    requirements: encodeBase64(requirements),
    handlerPy: encodeBase64(handler),
    handlerQs: "",
  };
}
