import { ApiClient, ApiError, decodeBase64, makeFnCode } from "../api.js";
import { clear, el, statusBadge } from "../format.js";
import { watchDeployment } from "../poll.js";
import type { DeploymentRecord, FunctionListItem } from "../types.js";

const TEMPLATES = ["qiskit", "cirq", "qsharp", "braket"];

const STARTER = `fn myfn template qiskit {
    param n : int min=1 max=8 default=2

    circuit {
        qubits n
        repeat q in 0..n { h q }
        measure all
    }

    post top | to_int
}
`;

export function renderFunctions(root: HTMLElement, api: ApiClient): void {
  clear(root);
  const list = el("div", { class: "function-list" });
  const editorHost = el("div");
  const filter = el("input", { placeholder: "filter by identifier…", class: "filter" });

  const toolbar = el("div", { class: "toolbar" }, [filter]);
  if (api.session.canDeploy) {
    const newButton = el("button", { class: "primary" }, ["New Function"]);
    newButton.addEventListener("click", () =>
      renderEditor(editorHost, api, null, () => void refresh()),
    );
    toolbar.append(newButton);
  }
  root.append(el("h1", {}, ["Functions"]), toolbar, editorHost, list);

  let items: FunctionListItem[] = [];

  function draw(): void {
    clear(list);
    const needle = filter.value.trim().toLowerCase();
    const visible = items.filter((f) => f.identifier.includes(needle));
    if (!visible.length) {
      list.append(el("p", { class: "muted" }, ["No functions yet."]));
      return;
    }
    for (const fn of visible) {
      const row = el("div", { class: "card function-row" }, [
        el("div", { class: "function-head" }, [
          el("a", { href: `#/invoke/${fn.identifier}`, class: "function-name" }, [
            fn.identifier,
          ]),
          statusBadge(fn.status),
        ]),
        el("div", { class: "muted small" }, [
          `template ${fn.template} · v${fn.version} · by ${fn.author} · ` +
            (fn.public ? "public" : "private"),
        ]),
      ]);
      const actions = el("div", { class: "row-actions" });
      if (fn.status === "Ready") {
        const invoke = el("a", { href: `#/invoke/${fn.identifier}`, class: "linklike" }, [
          "Invoke",
        ]);
        actions.append(invoke);
      }
      if (api.session.canDeploy && (api.session.user?.username === fn.author ||
          api.session.user?.role === "admin")) {
        const edit = el("button", { class: "linklike" }, ["Edit"]);
        edit.addEventListener("click", () => {
          void api.getFunction(fn.identifier).then((detail) => {
            renderEditor(editorHost, api, {
              identifier: fn.identifier,
              name: fn.name,
              template: fn.template,
              handler: decodeBase64(detail.fnCode.handlerPy),
              requirements: decodeBase64(detail.fnCode.requirements),
              isPublic: fn.public,
            }, () => void refresh());
          });
        });
        actions.append(edit);
      }
      row.append(actions);
      const stagesHost = el("div");
      row.append(stagesHost);
      if (fn.status !== "Ready") {
        void api
          .deployments(fn.identifier)
          .then((deployments) => {
            const latest = deployments[deployments.length - 1];
            if (latest) stagesHost.append(stagePanel(latest));
          })
          .catch(() => undefined);
      }
      list.append(row);
    }
  }

  async function refresh(): Promise<void> {
    try {
      items = await api.listFunctions();
      draw();
    } catch (problem) {
      clear(list);
      list.append(el("p", { class: "form-error" }, [describeProblem(problem)]));
    }
  }

  filter.addEventListener("input", draw);
  void refresh();
}

interface EditorSeed {
  identifier: string;
  name: string;
  template: string;
  handler: string;
  requirements: string;
  isPublic: boolean;
}

function renderEditor(
  host: HTMLElement,
  api: ApiClient,
  seed: EditorSeed | null,
  onSettled: () => void,
): void {
  clear(host);
  const name = el("input", { value: seed?.name ?? "", placeholder: "e.g. qrng" });
  if (seed) name.setAttribute("disabled", "disabled");
  const template = el("select");
  for (const tag of TEMPLATES) {
    const option = el("option", { value: tag }, [tag]);
    if (tag === (seed?.template ?? "qiskit")) option.setAttribute("selected", "selected");
    template.append(option);
  }
  if (seed) template.setAttribute("disabled", "disabled");

  const handler = el("textarea", { class: "code", rows: "14", spellcheck: "false" });
  handler.value = seed?.handler ?? STARTER;
  const requirements = el("textarea", { class: "code", rows: "14", spellcheck: "false" });
  requirements.value = seed?.requirements ?? "";
  requirements.hidden = true;

  const tabHandler = el("button", { class: "tab active" }, ["handler"]);
  const tabRequirements = el("button", { class: "tab" }, ["requirements"]);
  tabHandler.addEventListener("click", () => {
    handler.hidden = false;
    requirements.hidden = true;
    tabHandler.classList.add("active");
    tabRequirements.classList.remove("active");
  });
  tabRequirements.addEventListener("click", () => {
    handler.hidden = true;
    requirements.hidden = false;
    tabRequirements.classList.add("active");
    tabHandler.classList.remove("active");
  });

  const isPublic = el("input", { type: "checkbox" }) as HTMLInputElement;
  isPublic.checked = seed?.isPublic ?? false;
  const deployButton = el("button", { class: "primary" }, [seed ? "Redeploy" : "Deploy"]);
  const cancel = el("button", { class: "linklike" }, ["Close"]);
  const problems = el("p", { class: "form-error", hidden: "hidden" });
  const stagesHost = el("div");

  const panel = el("div", { class: "card editor" }, [
    el("h2", {}, [seed ? `Edit ${seed.identifier}` : "New Function"]),
    el("div", { class: "editor-grid" }, [
      el("label", {}, ["Name"]),
      name,
      el("label", {}, ["Template"]),
      template,
    ]),
    el("div", { class: "tabs" }, [tabHandler, tabRequirements]),
    handler,
    requirements,
    el("label", { class: "inline" }, [isPublic, " publicly visible"]),
    problems,
    el("div", { class: "row-actions" }, [deployButton, cancel]),
    stagesHost,
  ]);

  cancel.addEventListener("click", () => clear(host));

  deployButton.addEventListener("click", () => {
    problems.hidden = true;
    deployButton.setAttribute("disabled", "disabled");
    void (async () => {
      try {
        const fnCode = makeFnCode(handler.value, requirements.value);
        let identifier: string;
        if (seed) {
          await api.updateFunction(seed.identifier, { fnCode, public: isPublic.checked });
          identifier = seed.identifier;
        } else {
          const created = await api.createFunction({
            name: name.value.trim(),
            template: template.value,
            fnCode,
            public: isPublic.checked,
          });
          identifier = created.function.identifier;
        }
        watchDeployment(
          api,
          identifier,
          (deployment, functionStatus) => {
            clear(stagesHost);
            stagesHost.append(stagePanel(deployment));
            if (functionStatus === "Ready" || functionStatus === "FailedDeploy") {
              deployButton.removeAttribute("disabled");
              onSettled();
            }
          },
          () => deployButton.removeAttribute("disabled"),
        );
      } catch (problem) {
        problems.hidden = false;
        problems.textContent = describeProblem(problem);
        deployButton.removeAttribute("disabled");
      }
    })();
  });

  host.append(panel);
}

export function stagePanel(deployment: DeploymentRecord): HTMLElement {
  const panel = el("div", { class: "stages" });
  for (const stage of deployment.stages) {
    const row = el("div", { class: `stage stage-${stage.status}` }, [
      el("span", { class: "stage-name" }, [stage.name]),
      el("span", { class: "stage-status" }, [stage.status]),
    ]);
    if (stage.log && (stage.status === "failed" || stage.status === "passed")) {
      row.append(el("pre", { class: "stage-log" }, [stage.log]));
    }
    panel.append(row);
  }
  return panel;
}

export function describeProblem(problem: unknown): string {
  if (problem instanceof ApiError) {
    if (problem.details && typeof problem.details === "object") {
      const reasons = Object.entries(problem.details as Record<string, unknown>)
        .map(([key, value]) => `${key}: ${String(value)}`)
        .join("; ");
      return `${problem.code}: ${problem.message}${reasons ? ` (${reasons})` : ""}`;
    }
    return `${problem.code}: ${problem.message}`;
  }
  return "cannot reach the server";
}
