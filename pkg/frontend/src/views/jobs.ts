import { ApiClient } from "../api.js";
import { clear, countsChart, describeData, el, shortTime, statusBadge } from "../format.js";
import { JOB_POLL_INTERVAL_MS, realScheduler, watchJob, Watch } from "../poll.js";
import { describeProblem } from "./functions.js";
import type { JobRow } from "../types.js";

const PAGE_SIZE = 15;
const STATUSES = ["", "Created", "Queued", "Running", "Completed", "Failed"];

export function renderJobs(root: HTMLElement, api: ApiClient): () => void {
  clear(root);
  const statusFilter = el("select");
  for (const status of STATUSES) {
    statusFilter.append(el("option", { value: status }, [status || "all statuses"]));
  }
  const table = el("div", { class: "job-table" });
  const pager = el("div", { class: "pager" });
  root.append(
    el("h1", {}, ["Jobs"]),
    el("div", { class: "toolbar" }, [statusFilter]),
    table,
    pager,
  );

  let offset = 0;
  let cancelRefresh: (() => void) | null = null;
  let disposed = false;

  async function refresh(): Promise<void> {
    if (disposed) return;
    try {
      const page = await api.listJobs({
        status: (statusFilter as HTMLSelectElement).value || undefined,
        offset,
        limit: PAGE_SIZE,
      });
      if (disposed) return;
      clear(table);
      if (!page.jobs.length) {
        table.append(el("p", { class: "muted" }, ["No jobs here yet."]));
      }
      for (const job of page.jobs) {
        const row = el("a", { href: `#/job/${job.job_id}`, class: "card job-row" }, [
          el("div", { class: "job-head" }, [
            el("code", {}, [job.job_id.slice(0, 8)]),
            statusBadge(job.status),
          ]),
          el("div", { class: "muted small" }, [
            `${job.function_identifier} · ${job.backend_name} · ` +
              `${shortTime(job.submitted_at)} · data ${describeData(job.result_data)}`,
          ]),
        ]);
        table.append(row);
      }
      clear(pager);
      const pages = Math.max(1, Math.ceil(page.total / PAGE_SIZE));
      const current = Math.floor(offset / PAGE_SIZE) + 1;
      const prev = el("button", { class: "linklike" }, ["← prev"]);
      const next = el("button", { class: "linklike" }, ["next →"]);
      if (offset === 0) prev.setAttribute("disabled", "disabled");
      if (offset + PAGE_SIZE >= page.total) next.setAttribute("disabled", "disabled");
      prev.addEventListener("click", () => {
        offset = Math.max(0, offset - PAGE_SIZE);
        void refresh();
      });
      next.addEventListener("click", () => {
        offset += PAGE_SIZE;
        void refresh();
      });
      pager.append(prev, el("span", { class: "muted small" }, [` ${current}/${pages} `]), next);

      const hasLive = page.jobs.some(
        (job) => job.status !== "Completed" && job.status !== "Failed",
      );
      cancelRefresh?.();
      if (hasLive) {
        // Keep the table live while anything is still moving.
        cancelRefresh = realScheduler.schedule(() => void refresh(), JOB_POLL_INTERVAL_MS);
      }
    } catch (problem) {
      if (disposed) return;
      clear(table);
      table.append(el("p", { class: "form-error" }, [describeProblem(problem)]));
    }
  }

  statusFilter.addEventListener("change", () => {
    offset = 0;
    void refresh();
  });
  void refresh();

  return () => {
    disposed = true;
    cancelRefresh?.();
  };
}

export function renderJobDetail(root: HTMLElement, api: ApiClient, jobId: string): () => void {
  clear(root);
  const host = el("div");
  root.append(
    el("h1", {}, ["Job"]),
    el("a", { href: "#/jobs", class: "linklike" }, ["← all jobs"]),
    host,
  );

  let watcher: Watch | null = null;

  function paint(job: JobRow): void {
    clear(host);
    const card = el("div", { class: "card" }, [
      el("div", { class: "job-head" }, [el("code", {}, [job.job_id]), statusBadge(job.status)]),
      el("div", { class: "kv" }, [
        kv("function", job.function_identifier),
        kv("backend", `${job.backend_name} (${job.provider})`),
        kv("shots", String(job.shots)),
        kv("seed", String(job.seed)),
        kv("submitted", shortTime(job.submitted_at)),
        kv("waiting", job.waiting_ms === null ? "-" : `${job.waiting_ms.toFixed(0)} ms`),
        kv("running", job.running_ms === null ? "-" : `${job.running_ms.toFixed(0)} ms`),
        kv("data", describeData(job.result_data)),
      ]),
    ]);
    if (job.error) card.append(el("p", { class: "form-error" }, [job.error]));
    if (job.counts) card.append(countsChart(job.counts));
    if (job.circuit_text) {
      card.append(el("h3", {}, ["Circuit"]), el("pre", { class: "stage-log" }, [job.circuit_text]));
    }
    host.append(card);
  }

  void api
    .getJob(jobId)
    .then((job) => {
      paint(job);
      if (job.status !== "Completed" && job.status !== "Failed") {
        watcher = watchJob(api, jobId, paint);
      }
    })
    .catch((problem) => {
      clear(host);
      host.append(el("p", { class: "form-error" }, [describeProblem(problem)]));
    });

  return () => watcher?.stop();
}

function kv(key: string, value: string): HTMLElement {
  return el("div", { class: "kv-row" }, [
    el("span", { class: "kv-key" }, [key]),
    el("span", { class: "kv-value" }, [value]),
  ]);
}
