/** Wire types mirroring the gateway's JSON schemas, field for field. */
export const TERMINAL_JOB_STATUSES = new Set(["Completed", "Failed"]);
export const TERMINAL_FUNCTION_STATUSES = new Set(["Ready", "FailedDeploy"]);
