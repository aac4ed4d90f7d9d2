/** Wire types mirroring the gateway's JSON schemas, field for field. */

export interface LoginResponse {
  access_token: string;
  token_type: string;
  expires_in: number;
}

export interface Identity {
  username: string;
  role: "admin" | "developer" | "enduser";
}

export interface FunctionListItem {
  identifier: string;
  name: string;
  template: string;
  author: string;
  public: boolean;
  version: number;
  status: string;
  created_at: string | null;
  updated_at: string | null;
}

export interface FunctionDetail extends FunctionListItem {
  fnCode: FnCode;
}

export interface FnCode {
  requirements: string;
  handlerPy: string;
  handlerQs: string;
}

export interface CreateFunctionBody {
  name: string;
  template: string;
  fnCode: FnCode;
  public: boolean;
  author?: string;
}

export interface UpdateFunctionBody {
  fnCode?: FnCode;
  public?: boolean;
}

export interface StageResult {
  name: string;
  status: "pending" | "running" | "passed" | "failed";
  log: string;
  at: string | null;
}

export interface DeploymentRecord {
  identifier: string;
  version: number;
  started_at: string | null;
  finished_at: string | null;
  stages: StageResult[];
}

/** The invocation form; serializes 1:1 into the request schema. */
export interface InvokeForm {
  input: unknown;
  shots: number;
  provider: string | null;
  backendType: "qpu" | "simulator" | null;
  backendName: string | null;
  autoSelect: boolean;
  waitForResult: boolean;
  seed: number | null;
}

export interface InvokeRequestBody {
  input?: unknown;
  shots: number;
  waitForResult: boolean;
  provider?: string;
  autoSelect: boolean;
  backendType?: "qpu" | "simulator";
  backendName?: string;
  postProcessOnly?: boolean;
  jobId?: string;
  seed?: number;
}

export interface InvokeDetails {
  jobId: string;
  status: string;
  backend: string;
  provider: string;
  shots: number;
  seed: number;
  waiting_ms: number | null;
  running_ms: number | null;
  circuit: string;
  counts?: Record<string, number>;
  error?: string;
  postProcessOnly?: boolean;
}

export interface InvokeResponse {
  data: unknown;
  details: InvokeDetails;
}

export interface JobRow {
  job_id: string;
  function_identifier: string;
  owner: string;
  backend_name: string;
  provider: string;
  shots: number;
  seed: number;
  status: "Created" | "Queued" | "Running" | "Completed" | "Failed";
  submitted_at: string | null;
  started_at: string | null;
  finished_at: string | null;
  counts: Record<string, number> | null;
  result_data: unknown;
  error: string | null;
  waiting_ms: number | null;
  running_ms: number | null;
  circuit_text: string;
}

export interface JobPage {
  jobs: JobRow[];
  total: number;
  offset: number;
  limit: number;
}

export interface BackendRow {
  name: string;
  provider: string;
  kind: "qpu" | "simulator";
  qubits: number;
  operational: boolean;
  queue_length: number;
  avg_seconds_per_job: number;
  readout_flip_p: number;
  allowed_roles: string[];
}

export interface ErrorEnvelope {
  error: string;
  message: string;
  details: unknown;
}

export const TERMINAL_JOB_STATUSES = new Set(["Completed", "Failed"]);
export const TERMINAL_FUNCTION_STATUSES = new Set(["Ready", "FailedDeploy"]);
