/** Engine configuration editor: agent toggles plus per-parameter constraints.
 *
 * Constraint edits are validated against the fetched schemas before the
 * document can be saved, so out-of-range inputs never reach the API.
 */

import type { EngineConfigDoc, SchemaParam, Schemas } from "./types.js";

export interface ConstraintEdit {
  values?: number[];
  range?: [number, number];
}

export class EngineConfigModel {
  enabled = new Set<string>();
  constraints = new Map<string, Map<string, ConstraintEdit>>();
  candidateBudget = 6;
  episodesTrain = 200;
  episodesEval = 2;
  topK = 3;
  seed = 0;
  searchStrategy: "random" | "discrepancy_grid" = "discrepancy_grid";
  optimizationWorkers = 1;

  constructor(public schemas: Schemas) {
    for (const agent of Object.keys(schemas)) this.enabled.add(agent);
  }

  toggleAgent(agent: string): void {
    if (this.enabled.has(agent)) this.enabled.delete(agent);
    else this.enabled.add(agent);
  }

  paramSchema(agent: string, param: string): SchemaParam | undefined {
    return this.schemas[agent]?.find((p) => p.name === param);
  }

  /** Returns an error message, or null when the edit is accepted. */
  setConstraint(agent: string, param: string, edit: ConstraintEdit): string | null {
    const schema = this.paramSchema(agent, param);
    if (!schema) return `unknown parameter ${agent}.${param}`;
    if (schema.type === "discrete") {
      if (!edit.values || edit.values.length === 0) return "pick at least one value";
      const allowed = new Set(schema.values ?? []);
      for (const value of edit.values) {
        if (!allowed.has(value)) return `${value} is not an allowed value`;
      }
    } else {
      if (!edit.range) return "a range is required";
      const [lo, hi] = edit.range;
      const [slo, shi] = schema.range!;
      if (lo > hi) return "range is inverted";
      if (lo < slo || hi > shi) return `range must stay inside [${slo}, ${shi}]`;
    }
    if (!this.constraints.has(agent)) this.constraints.set(agent, new Map());
    this.constraints.get(agent)!.set(param, edit);
    return null;
  }

  clearConstraint(agent: string, param: string): void {
    this.constraints.get(agent)?.delete(param);
  }

  reset(): void {
    this.constraints.clear();
    this.enabled = new Set(Object.keys(this.schemas));
  }

  toDocument(): EngineConfigDoc {
    const constraints: EngineConfigDoc["constraints"] = {};
    for (const [agent, params] of this.constraints) {
      if (!this.enabled.has(agent) || params.size === 0) continue;
      constraints[agent] = {};
      for (const [name, edit] of params) {
        constraints[agent][name] = edit.values ? { values: edit.values } : { range: edit.range };
      }
    }
    return {
      enabled_agents: [...this.enabled].sort(),
      candidate_budget: this.candidateBudget,
      episodes_train: this.episodesTrain,
      episodes_eval: this.episodesEval,
      top_k: this.topK,
      seed: this.seed,
      search_strategy: this.searchStrategy,
      optimization_workers: this.optimizationWorkers,
      constraints,
    };
  }

  loadDocument(doc: EngineConfigDoc): void {
    this.enabled = new Set(doc.enabled_agents);
    this.candidateBudget = doc.candidate_budget;
    this.episodesTrain = doc.episodes_train;
    this.episodesEval = doc.episodes_eval;
    this.topK = doc.top_k;
    this.seed = doc.seed;
    this.searchStrategy = doc.search_strategy;
    this.optimizationWorkers = doc.optimization_workers ?? 1;
    this.constraints.clear();
    for (const [agent, params] of Object.entries(doc.constraints ?? {})) {
      const map = new Map<string, ConstraintEdit>();
      for (const [name, c] of Object.entries(params)) {
        map.set(name, c.values ? { values: [...c.values] } : { range: [...c.range!] as [number, number] });
      }
      this.constraints.set(agent, map);
    }
  }
}
