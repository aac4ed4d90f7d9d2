/**
 * Polling loops with an injectable scheduler so tests can run on fake time.
 *
 * The dashboard never holds a push channel: pending invoke cards and the
 * jobs table re-poll every 2 s until the watched object turns terminal, and
 * deployment panels follow the pipeline stages the same way.
 */

import { ApiClient } from "./api.js";
import {
  DeploymentRecord,
  JobRow,
  TERMINAL_FUNCTION_STATUSES,
  TERMINAL_JOB_STATUSES,
} from "./types.js";

export const JOB_POLL_INTERVAL_MS = 2000;
export const DEPLOY_POLL_INTERVAL_MS = 500;

export interface Scheduler {
  schedule(fn: () => void, delayMs: number): () => void;
}

export const realScheduler: Scheduler = {
  schedule(fn, delayMs) {
    const handle = setTimeout(fn, delayMs);
    return () => clearTimeout(handle);
  },
};

export interface Watch {
  stop(): void;
}

/**
 * Poll one job until Completed/Failed. `onUpdate` fires for every fetched
 * snapshot including the terminal one; polling then stops by itself.
 */
export function watchJob(
  api: ApiClient,
  jobId: string,
  onUpdate: (job: JobRow) => void,
  onError: (error: unknown) => void = () => undefined,
  scheduler: Scheduler = realScheduler,
  intervalMs: number = JOB_POLL_INTERVAL_MS,
): Watch {
  let cancelled = false;
  let cancelTimer: (() => void) | null = null;

  const tick = async (): Promise<void> => {
    if (cancelled) return;
    try {
      const job = await api.getJob(jobId);
      if (cancelled) return;
      onUpdate(job);
      if (TERMINAL_JOB_STATUSES.has(job.status)) return;
    } catch (error) {
      if (cancelled) return;
      onError(error);
      return;
    }
    cancelTimer = scheduler.schedule(() => void tick(), intervalMs);
  };

  cancelTimer = scheduler.schedule(() => void tick(), intervalMs);
  return {
    stop() {
      cancelled = true;
      cancelTimer?.();
    },
  };
}

/** Poll a function's latest deployment until every stage settles. */
export function watchDeployment(
  api: ApiClient,
  identifier: string,
  onUpdate: (deployment: DeploymentRecord, functionStatus: string) => void,
  onError: (error: unknown) => void = () => undefined,
  scheduler: Scheduler = realScheduler,
  intervalMs: number = DEPLOY_POLL_INTERVAL_MS,
): Watch {
  let cancelled = false;
  let cancelTimer: (() => void) | null = null;

  const tick = async (): Promise<void> => {
    if (cancelled) return;
    try {
      const record = await api.getFunction(identifier);
      const deployments = await api.deployments(identifier);
      if (cancelled) return;
      const latest = deployments[deployments.length - 1];
      if (latest) onUpdate(latest, record.status);
      if (TERMINAL_FUNCTION_STATUSES.has(record.status)) return;
    } catch (error) {
      if (cancelled) return;
      onError(error);
      return;
    }
    cancelTimer = scheduler.schedule(() => void tick(), intervalMs);
  };

  void tick();
  return {
    stop() {
      cancelled = true;
      cancelTimer?.();
    },
  };
}
