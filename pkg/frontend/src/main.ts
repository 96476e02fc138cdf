/** Browser entry point: wires pages to the API, stream, and view models. */

import { Api, ApiError } from "./api.js";
import { coverageBarsSvg, graphSvg, heatmapSvg, treemapSvg } from "./behavior.js";
import { lineChartSvg } from "./charts.js";
import { ComposerModel, toDocument, WIZARD_STEPS } from "./composer.js";
import { EngineConfigModel } from "./configmodel.js";
import { h, replaceChildren, svgContainer } from "./dom.js";
import { JobMonitorModel } from "./monitor.js";
import { parseHash, toHash } from "./router.js";
import { eventSourceFactory, StreamConnection } from "./sse.js";
import type { GymDocument } from "./types.js";

const base = localStorage.getItem("autodo.base") ?? "";
const token = localStorage.getItem("autodo.token") ?? "dev";
const api = new Api(base, token);

const root = document.getElementById("app")!;
let activeConnection: StreamConnection | null = null;

function banner(message: string): HTMLElement {
  return h("div", { class: "banner error" }, message);
}

async function guarded<T>(work: () => Promise<T>, container: HTMLElement): Promise<T | null> {
  try {
    return await work();
  } catch (error) {
    const message = error instanceof ApiError ? `${error.status}: ${error.message}` : String(error);
    container.prepend(banner(message));
    return null;
  }
}

// --- dashboard -----------------------------------------------------------

async function pageDashboard(): Promise<void> {
  const container = h("div", { class: "page" });
  replaceChildren(root, container);
  const projects = await guarded(() => api.listProjects(), container);
  if (!projects) return;

  const name = h("input", { placeholder: "new project name" }) as HTMLInputElement;
  container.append(
    h("h1", {}, "Projects"),
    h(
      "div",
      { class: "row" },
      name,
      h("button", {
        onclick: async () => {
          if (!name.value.trim()) return;
          await guarded(() => api.createProject(name.value.trim()), container);
          pageDashboard();
        },
      }, "Create"),
    ),
  );
  for (const project of projects) {
    const section = h("section", { class: "project card" }, h("h2", {}, project.name));
    container.append(section);
    const [gyms, configs, jobs] = await Promise.all([
      api.listGyms(project.id),
      api.listConfigs(project.id),
      api.listJobs(project.id),
    ]);
    const gymRows = gyms.map((gym) =>
      h("tr", {}, h("td", {}, gym.name), h("td", {}, gym.id)),
    );
    const configRows = configs.map((config) =>
      h("tr", {}, h("td", {}, config.id), h("td", {}, config.shared ? "shared" : "project")),
    );
    const jobRows = jobs.map((job) =>
      h(
        "tr",
        {},
        h("td", {}, h("a", { href: toHash("monitor", [job.id]) }, job.id)),
        h("td", { class: `status-${job.status}` }, job.status),
        h(
          "td",
          {},
          job.status === "created"
            ? h("button", {
                onclick: async () => {
                  await guarded(() => api.launch(job.id), container);
                  pageDashboard();
                },
              }, "Launch")
            : job.status === "succeeded"
              ? h("a", { href: toHash("behavior", [job.id]) }, "behavior")
              : "",
        ),
      ),
    );
    section.append(
      h("h3", {}, `Gyms (${gyms.length})`),
      table(["name", "id"], gymRows),
      h("div", { class: "row" },
        h("a", { href: toHash("composer", [project.id]) }, "+ compose gym")),
      h("h3", {}, `Configs (${configs.length})`),
      table(["id", "scope"], configRows),
      h("div", { class: "row" },
        h("a", { href: toHash("config", [project.id]) }, "+ new config")),
      h("h3", {}, `Jobs (${jobs.length})`),
      table(["id", "status", ""], jobRows),
      newJobControls(project.id, gyms, configs, container),
    );
  }
}

function table(headers: string[], rows: HTMLElement[]): HTMLElement {
  return h(
    "table",
    {},
    h("thead", {}, h("tr", {}, ...headers.map((head) => h("th", {}, head)))),
    h("tbody", {}, ...rows),
  );
}

function newJobControls(
  projectId: string,
  gyms: { id: string; name: string }[],
  configs: { id: string }[],
  container: HTMLElement,
): HTMLElement {
  if (!gyms.length || !configs.length) {
    return h("p", { class: "hint" }, "create a gym and a config to launch a job");
  }
  const gymSelect = h("select", {}, ...gyms.map((g) => h("option", { value: g.id }, g.name))) as HTMLSelectElement;
  const configSelect = h("select", {}, ...configs.map((c) => h("option", { value: c.id }, c.id))) as HTMLSelectElement;
  return h(
    "div",
    { class: "row" },
    gymSelect,
    configSelect,
    h("button", {
      onclick: async () => {
        const job = await guarded(
          () => api.createJob(projectId, gymSelect.value, configSelect.value),
          container,
        );
        if (job) {
          await guarded(() => api.launch(job.id), container);
          location.hash = toHash("monitor", [job.id]);
        }
      },
    }, "Create + launch job"),
  );
}

// --- composer ---------------------------------------------------------------

async function pageComposer(projectId: string): Promise<void> {
  const model = new ComposerModel();
  const container = h("div", { class: "page composer" });
  replaceChildren(root, container);

  const route = parseHash(location.hash);
  const templateId = route.params.get("template");
  if (templateId) {
    const template = await guarded(() => api.catalogTemplate(templateId), container);
    if (template) model.load(template.spec);
  }

  const sourcePane = h("pre", { class: "source" }, "// generated source appears here");
  const form = h("div", { class: "wizard" });
  container.append(
    h("h1", {}, "Gym composer"),
    h(
      "div",
      { class: "row" },
      h("button", { onclick: () => uploadFlow(model, container, render) }, "Upload document"),
      h("a", { href: toHash("catalog", [projectId]) }, "Browse template catalog"),
    ),
    h("div", { class: "split" }, form, sourcePane),
  );

  async function refreshSource(): Promise<void> {
    if (!model.readyToSubmit()) return;
    try {
      const out = await api.codegen(toDocument(model.draft));
      sourcePane.textContent = out.source;
    } catch (error) {
      sourcePane.textContent = `// ${error instanceof ApiError ? error.message : error}`;
    }
  }

  function render(): void {
    replaceChildren(
      form,
      h("div", { class: "steps sticky" },
        ...WIZARD_STEPS.map((step) =>
          h("button", {
            class: step === model.step ? "step active" : "step",
            onclick: () => { model.step = step; render(); },
          }, step.replace("_", " ")),
        )),
      renderStep(model, render, refreshSource),
      h("div", { class: "row" },
        h("button", { onclick: () => { model.previous(); render(); } }, "Back"),
        h("button", { onclick: () => { model.next(); render(); } }, "Next"),
        h("button", {
          onclick: async () => {
            try {
              const out = await api.putGym(projectId, toDocument(model.draft));
              container.prepend(h("div", { class: "banner ok" }, `stored gym ${out.gym_id}`));
            } catch (error) {
              if (error instanceof ApiError) {
                model.findings = error.findings;
                render();
                container.prepend(banner(error.message));
              }
            }
          },
        }, "Submit gym")),
      ...model.findingsForStep(model.step).map((f) =>
        h("div", { class: "finding" }, `${f.code} at ${f.path}`)),
    );
    refreshSource();
  }
  render();
}

function uploadFlow(model: ComposerModel, container: HTMLElement, render: () => void): void {
  const input = document.createElement("input");
  input.type = "file";
  input.accept = "application/json";
  input.onchange = async () => {
    const file = input.files?.[0];
    if (!file) return;
    try {
      model.load(JSON.parse(await file.text()) as GymDocument);
      render();
    } catch (error) {
      container.prepend(banner(`upload failed: ${error}`));
    }
  };
  input.click();
}

function labeled(label: string, input: HTMLElement): HTMLElement {
  return h("label", { class: "field" }, h("span", {}, label), input);
}

function numberInput(value: number, onchange: (v: number) => void): HTMLElement {
  const input = h("input", { type: "number", value: String(value) }) as HTMLInputElement;
  input.addEventListener("change", () => onchange(Number(input.value)));
  return input;
}

function textInput(value: string, onchange: (v: string) => void): HTMLElement {
  const input = h("input", { value }) as HTMLInputElement;
  input.addEventListener("change", () => onchange(input.value));
  return input;
}

function renderStep(model: ComposerModel, render: () => void, refresh: () => void): HTMLElement {
  const draft = model.draft;
  const panel = h("div", { class: "panel" });
  const commit = () => { refresh(); };

  panel.append(
    labeled("gym name", textInput(draft.name, (v) => { draft.name = v; commit(); })),
    labeled("description", textInput(draft.description, (v) => { draft.description = v; commit(); })),
  );

  if (model.step === "state_vars") {
    draft.stateVars.forEach((variable, index) => {
      panel.append(
        h("div", { class: "row" },
          textInput(variable.name, (v) => {
            delete draft.initialState[variable.name];
            variable.name = v;
            draft.initialState[v] = draft.initialState[v] ?? variable.lower;
            commit();
          }),
          h("select", {
            onchange: (event) => {
              variable.kind = (event.target as HTMLSelectElement).value as "integer" | "real";
              commit();
            },
          }, h("option", variable.kind === "integer" ? { selected: "1" } : {}, "integer"),
             h("option", variable.kind === "real" ? { selected: "1" } : {}, "real")),
          numberInput(variable.lower, (v) => { variable.lower = v; commit(); }),
          numberInput(variable.upper, (v) => { variable.upper = v; commit(); }),
          labeled("initial", numberInput(draft.initialState[variable.name] ?? 0, (v) => {
            draft.initialState[variable.name] = v; commit();
          })),
          h("button", { onclick: () => { draft.stateVars.splice(index, 1); delete draft.initialState[variable.name]; render(); } }, "x"),
        ),
      );
    });
    panel.append(h("button", {
      onclick: () => {
        const name = `var${draft.stateVars.length + 1}`;
        draft.stateVars.push({ name, kind: "integer", lower: 0, upper: 10 });
        draft.initialState[name] = 0;
        render();
      },
    }, "+ state variable"));
  } else if (model.step === "actions") {
    draft.actions.forEach((action, index) => {
      panel.append(h("div", { class: "row" },
        textInput(action.name, (v) => { action.name = v; commit(); }),
        h("span", { class: "hint" },
          action.params.map((p) => `${p.name}∈{${p.values.join(",")}}`).join(" ") || "atomic"),
        h("button", { onclick: () => { draft.actions.splice(index, 1); render(); } }, "x"),
      ));
    });
    panel.append(h("button", {
      onclick: () => { draft.actions.push({ name: `act${draft.actions.length + 1}`, params: [] }); render(); },
    }, "+ action"));
  } else if (model.step === "transition") {
    draft.transition.forEach((rule) => {
      panel.append(h("h4", {}, rule.action));
      for (const [variable, expression] of Object.entries(rule.assign)) {
        panel.append(labeled(`${variable} =`, textInput(expression, (v) => {
          rule.assign[variable] = v; commit();
        })));
      }
    });
    panel.append(h("button", {
      onclick: () => {
        const action = draft.actions[0]?.name ?? "act1";
        draft.transition.push({ action, assign: { [draft.stateVars[0]?.name ?? "var1"]: "0" } });
        render();
      },
    }, "+ transition rule"));
  } else if (model.step === "reward_metrics") {
    draft.rewardMetrics.forEach((metric, index) => {
      panel.append(h("div", { class: "row" },
        textInput(metric.name, (v) => { metric.name = v; commit(); }),
        labeled("weight", numberInput(metric.weight, (v) => { metric.weight = v; commit(); })),
        labeled("expression", textInput(metric.expression, (v) => { metric.expression = v; commit(); })),
        h("button", { onclick: () => { draft.rewardMetrics.splice(index, 1); render(); } }, "x"),
      ));
    });
    panel.append(h("button", {
      onclick: () => { draft.rewardMetrics.push({ name: `metric${draft.rewardMetrics.length + 1}`, weight: 1.0, expression: "0" }); render(); },
    }, "+ reward metric"));
  } else {
    panel.append(
      labeled("termination (boolean)", textInput(draft.termination, (v) => { draft.termination = v; commit(); })),
      labeled("max steps", numberInput(draft.maxSteps, (v) => { draft.maxSteps = v; commit(); })),
    );
  }
  return panel;
}

// --- catalog ---------------------------------------------------------------

async function pageCatalog(projectId: string, taxonomy: "do_type" | "industry", nodeId?: string): Promise<void> {
  const container = h("div", { class: "page" });
  replaceChildren(root, container);
  container.append(
    h("h1", {}, "Template catalog"),
    h("div", { class: "row" },
      h("a", { href: toHash("catalog", [projectId, "do_type"]) }, "By optimization type"),
      h("a", { href: toHash("catalog", [projectId, "industry"]) }, "By industry"),
    ),
  );
  const browse = await guarded(
    () => (nodeId ? api.catalogNode(taxonomy, nodeId) : api.catalogRoots(taxonomy)),
    container,
  );
  if (!browse) return;
  if (browse.parent) {
    container.append(h("div", { class: "tile pinned" }, browse.parent.title));
  }
  container.append(
    h("div", { class: "tiles" },
      ...browse.children.map((child) =>
        h("a", {
          class: "tile",
          href: toHash("catalog", [projectId, taxonomy, child.id]),
        }, `${child.title} (${child.template_count})`),
      )),
    h("h3", {}, "Templates here"),
    ...browse.templates.map((template) =>
      h("div", { class: "row" },
        h("strong", {}, template.name),
        h("span", { class: "hint" }, template.description),
        h("a", { href: toHash("composer", [projectId], { template: template.id }) }, "open in composer"),
      )),
  );
}

// --- engine config --------------------------------------------------------

async function pageConfig(projectId: string): Promise<void> {
  const container = h("div", { class: "page" });
  replaceChildren(root, container);
  const schemas = await guarded(() => api.getSchemas(), container);
  if (!schemas) return;
  const model = new EngineConfigModel(schemas);

  function render(): void {
    replaceChildren(container,
      h("h1", {}, "Engine configuration"),
      h("div", { class: "split" },
        h("div", { class: "panel" },
          h("h3", {}, "Agents"),
          ...Object.keys(schemas!).map((agent) =>
            h("label", { class: "row" },
              (() => {
                const box = h("input", { type: "checkbox" }) as HTMLInputElement;
                box.checked = model.enabled.has(agent);
                box.addEventListener("change", () => { model.toggleAgent(agent); render(); });
                return box;
              })(),
              agent,
            )),
          labeled("candidate budget", numberInput(model.candidateBudget, (v) => { model.candidateBudget = v; })),
          labeled("training episodes", numberInput(model.episodesTrain, (v) => { model.episodesTrain = v; })),
          labeled("evaluation episodes", numberInput(model.episodesEval, (v) => { model.episodesEval = v; })),
          labeled("top k", numberInput(model.topK, (v) => { model.topK = v; })),
          labeled("optimization workers", numberInput(model.optimizationWorkers, (v) => { model.optimizationWorkers = v; })),
          labeled("seed", numberInput(model.seed, (v) => { model.seed = v; })),
          h("button", { onclick: () => { model.reset(); render(); } }, "Reset to defaults"),
        ),
        h("div", { class: "panel" },
          h("h3", {}, "Hyperparameters"),
          ...[...model.enabled].flatMap((agent) => [
            h("h4", {}, agent),
            ...schemas![agent].map((param) => {
              const error = h("span", { class: "finding" });
              const current = model.constraints.get(agent)?.get(param.name);
              const shown = param.type === "discrete"
                ? (current?.values ?? param.values ?? []).join(",")
                : (current?.range ?? param.range ?? []).join("..");
              return h("div", { class: "row" },
                h("span", { class: "hint" }, `${param.name} (${param.type}, default ${param.default})`),
                textInput(shown, (value) => {
                  const edit = param.type === "discrete"
                    ? { values: value.split(",").map(Number) }
                    : { range: value.split("..").map(Number) as [number, number] };
                  const problem = model.setConstraint(agent, param.name, edit);
                  error.textContent = problem ?? "";
                }),
                error,
              );
            }),
          ]),
          h("button", {
            onclick: async () => {
              await guarded(() => api.putConfig(model.toDocument(), false, projectId), container);
              container.prepend(h("div", { class: "banner ok" }, "config stored"));
            },
          }, "Save config"),
        ),
      ),
    );
  }
  render();
}

// --- job monitor ------------------------------------------------------------

async function pageMonitor(jobId: string): Promise<void> {
  activeConnection?.stop();
  const container = h("div", { class: "page" });
  replaceChildren(root, container);
  const model = new JobMonitorModel();

  const state = h("span", { class: "connection" }, "resuming");
  const chart = h("div", { class: "chartbox" });
  const board = h("div", {});
  const log = h("pre", { class: "log" });
  const slider = h("input", { type: "range", min: "0", max: "0", value: "0" }) as HTMLInputElement;
  const sliderLabel = h("span", { class: "hint" }, "live");

  container.append(
    h("h1", {}, `Job ${jobId} `, state),
    h("div", { class: "row" }, "replay: ", slider, sliderLabel),
    h("h3", {}, "Training reward"),
    chart,
    h("h3", {}, "Candidates"),
    board,
    h("h3", {}, "Event log"),
    log,
  );

  function uptoSeq(): number | undefined {
    const value = Number(slider.value);
    return value >= Number(slider.max) ? undefined : value;
  }

  function renderViews(): void {
    const upto = uptoSeq();
    state.textContent = model.connection;
    state.className = `connection ${model.connection}`;
    slider.max = String(model.lastSeq);
    if (upto === undefined) slider.value = String(model.lastSeq);
    sliderLabel.textContent = upto === undefined ? "live" : `seq ${upto}`;
    replaceChildren(chart, svgContainer(lineChartSvg(model.rewardSeries(upto))));
    replaceChildren(board, table(
      ["candidate", "agent", "status", "score"],
      model.candidateTable(upto).map((row) =>
        h("tr", {},
          h("td", {}, row.candidate_id),
          h("td", {}, row.agent),
          h("td", {}, row.status),
          h("td", {}, row.rank_score === null ? "-" : row.rank_score.toFixed(3)),
        )),
    ));
    const lines = model.orderedEvents(upto).slice(-40).map((event) =>
      `${String(event.seq).padStart(5)} ${event.kind.padEnd(19)} ${JSON.stringify(event.payload).slice(0, 110)}`,
    );
    log.textContent = lines.join("\n");
  }

  slider.addEventListener("input", renderViews);

  activeConnection = new StreamConnection(
    eventSourceFactory(base, jobId),
    {
      resumeFrom: () => model.resumeFrom(),
      onEvent: (event) => { model.ingest(event); renderViews(); },
      onLive: () => renderViews(),
      onResuming: () => { model.markResuming(); renderViews(); },
      onEnded: () => { model.markEnded(); renderViews(); },
    },
  );
  activeConnection.start();
  renderViews();
}

// --- behavior explorer ------------------------------------------------------

async function pageBehavior(jobId: string, candidateId?: string): Promise<void> {
  const container = h("div", { class: "page" });
  replaceChildren(root, container);
  const listing = await guarded(() => api.candidates(jobId), container);
  if (!listing) return;
  const cid = candidateId ?? listing.top_k[0];
  container.append(
    h("h1", {}, `Behavior: ${jobId} / ${cid}`),
    h("div", { class: "row" },
      ...listing.top_k.map((id) =>
        h("a", { class: id === cid ? "active" : "", href: toHash("behavior", [jobId, id]) }, id)),
    ),
  );

  const controls = h("div", { class: "row sticky" });
  const matrixBox = h("div", { class: "split" });
  const graphBox = h("div", {});
  const rulesBox = h("div", { class: "split" });
  container.append(controls, h("h3", {}, "Transition matrices"), matrixBox,
    h("h3", {}, "Transition graph + agent tour"), graphBox,
    h("h3", {}, "Surrogate rules"), rulesBox);

  const kInput = numberInput(10, () => refresh()) as HTMLInputElement;
  const dimsSelect = h("select", { onchange: () => refresh() },
    h("option", { value: "2", selected: "1" }, "2D"),
    h("option", { value: "3" }, "3D")) as HTMLSelectElement;
  const columnInput = textInput("action", () => refresh()) as HTMLInputElement;
  const bucketsInput = numberInput(2, () => refresh()) as HTMLInputElement;
  const loInput = numberInput(0, () => refresh()) as HTMLInputElement;
  const hiInput = numberInput(20, () => refresh()) as HTMLInputElement;
  controls.append(
    labeled("clusters k", kInput), labeled("graph dims", dimsSelect),
    labeled("rule label column", columnInput), labeled("buckets", bucketsInput),
    labeled("episodes from", loInput), labeled("to", hiInput),
  );

  async function refresh(): Promise<void> {
    replaceChildren(matrixBox);
    replaceChildren(graphBox);
    replaceChildren(rulesBox);
    try {
      const raw = await api.matrix(jobId, cid, "state");
      matrixBox.append(svgContainer(heatmapSvg(raw), "panel"));
      const k = Number(kInput.value) || 10;
      const clustered = await api.clusteredMatrix(jobId, cid, k);
      matrixBox.append(svgContainer(heatmapSvg(clustered.matrix), "panel"));
    } catch (error) {
      matrixBox.append(banner(error instanceof ApiError ? error.message : String(error)));
    }
    try {
      const dims = Number(dimsSelect.value) as 2 | 3;
      const layout = await api.layout(jobId, cid, dims, 1);
      graphBox.append(svgContainer(graphSvg(layout), "panel"));
    } catch (error) {
      graphBox.append(banner(error instanceof ApiError ? error.message : String(error)));
    }
    try {
      const rules = await api.rules(jobId, cid, {
        column: columnInput.value || "action",
        buckets: Number(bucketsInput.value) || 2,
        lo: Number(loInput.value) || 0,
        hi: Number(hiInput.value) || 20,
      });
      rulesBox.append(svgContainer(coverageBarsSvg(rules), "panel"));
      rulesBox.append(svgContainer(treemapSvg(rules), "panel"));
    } catch (error) {
      rulesBox.append(banner(error instanceof ApiError ? error.message : String(error)));
    }
  }
  refresh();
}

// --- routing ------------------------------------------------------------------

async function route(): Promise<void> {
  const current = parseHash(location.hash);
  activeConnection?.stop();
  activeConnection = null;
  switch (current.page) {
    case "composer":
      return pageComposer(current.args[0]);
    case "catalog":
      return pageCatalog(current.args[0], (current.args[1] as "do_type" | "industry") ?? "do_type", current.args[2]);
    case "config":
      return pageConfig(current.args[0]);
    case "monitor":
      return pageMonitor(current.args[0]);
    case "behavior":
      return pageBehavior(current.args[0], current.args[1]);
    default:
      return pageDashboard();
  }
}

window.addEventListener("hashchange", route);
route();
