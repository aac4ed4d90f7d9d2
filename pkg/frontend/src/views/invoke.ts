import { ApiClient, buildInvokeBody } from "../api.js";
import { clear, countsChart, describeData, el, statusBadge } from "../format.js";
import { watchJob } from "../poll.js";
import { describeProblem } from "./functions.js";
import type { InvokeForm, InvokeResponse, JobRow } from "../types.js";

export function renderInvoke(root: HTMLElement, api: ApiClient, identifier: string): void {
  clear(root);
  const heading = el("h1", {}, [`Invoke ${identifier}`]);
  const back = el("a", { href: "#/functions", class: "linklike" }, ["← all functions"]);

  const input = el("input", { placeholder: "e.g. 4 or {\"n\": 4}" });
  const shots = el("input", { type: "number", value: "1024", min: "1" });
  const seed = el("input", { type: "number", placeholder: "random" });
  const backend = el("select");
  const backendType = el("select");
  for (const [value, label] of [["", "any kind"], ["qpu", "qpu"], ["simulator", "simulator"]]) {
    backendType.append(el("option", { value: value ?? "" }, [label ?? ""]));
  }
  const wait = el("input", { type: "checkbox" }) as HTMLInputElement;
  wait.checked = true;

  const run = el("button", { class: "primary" }, ["Invoke"]);
  const problems = el("p", { class: "form-error", hidden: "hidden" });
  const output = el("div");

  backend.append(el("option", { value: "" }, ["auto-select"]));
  void api
    .backends()
    .then((rows) => {
      for (const row of rows) {
        const label = `${row.name} (${row.kind}, ${row.qubits}q, queue ${row.queue_length})`;
        const option = el("option", { value: row.name }, [label]);
        if (!row.operational) option.setAttribute("disabled", "disabled");
        backend.append(option);
      }
    })
    .catch(() => undefined);

  const form = el("div", { class: "card invoke-form" }, [
    el("div", { class: "editor-grid" }, [
      el("label", {}, ["Input"]),
      input,
      el("label", {}, ["Shots"]),
      shots,
      el("label", {}, ["Backend"]),
      backend,
      el("label", {}, ["Kind"]),
      backendType,
      el("label", {}, ["Seed"]),
      seed,
    ]),
    el("label", { class: "inline" }, [wait, " wait for the result"]),
    problems,
    el("div", { class: "row-actions" }, [run]),
  ]);

  run.addEventListener("click", () => {
    problems.hidden = true;
    run.setAttribute("disabled", "disabled");
    const formState: InvokeForm = {
      input: parseInput(input.value),
      shots: Number(shots.value) || 1024,
      provider: null,
      backendType: (backendType as HTMLSelectElement).value
        ? ((backendType as HTMLSelectElement).value as "qpu" | "simulator")
        : null,
      backendName: (backend as HTMLSelectElement).value || null,
      autoSelect: true,
      waitForResult: wait.checked,
      seed: seed.value === "" ? null : Number(seed.value),
    };
    void api
      .invoke(identifier, buildInvokeBody(formState))
      .then((response) => renderOutcome(output, api, response))
      .catch((problem) => {
        problems.hidden = false;
        problems.textContent = describeProblem(problem);
      })
      .finally(() => run.removeAttribute("disabled"));
  });

  root.append(heading, back, form, output);
}

function parseInput(raw: string): unknown {
  const text = raw.trim();
  if (!text) return null;
  try {
    return JSON.parse(text);
  } catch {
    return text;
  }
}

function renderOutcome(host: HTMLElement, api: ApiClient, response: InvokeResponse): void {
  clear(host);
  const details = response.details;
  const card = el("div", { class: "card outcome" });
  const headline = el("div", { class: "outcome-head" });
  const dataLine = el("div", { class: "outcome-data" });
  const body = el("div");
  card.append(headline, dataLine, body);
  host.append(card);

  function paint(statusText: string, data: unknown, job: JobRow | null): void {
    clear(headline);
    clear(dataLine);
    clear(body);
    headline.append(
      statusBadge(statusText),
      el("a", { href: `#/job/${details.jobId}`, class: "muted small" }, [
        ` job ${details.jobId}`,
      ]),
    );
    dataLine.append(el("strong", {}, ["data: "]), describeData(data));
    const counts = job?.counts ?? details.counts;
    if (counts) body.append(countsChart(counts));
    const meta = job
      ? `backend ${job.backend_name} · shots ${job.shots} · seed ${job.seed}`
      : `backend ${details.backend} · shots ${details.shots} · seed ${details.seed}`;
    body.append(el("div", { class: "muted small" }, [meta]));
  }

  paint(details.status, response.data, null);

  if (details.status !== "Completed" && details.status !== "Failed") {
    // Pending card: keep polling the job until it lands, no refresh needed.
    watchJob(api, details.jobId, (job) => {
      paint(job.status, job.result_data, job);
    });
  }
}
