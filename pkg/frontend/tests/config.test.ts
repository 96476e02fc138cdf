import { describe, expect, it } from "vitest";

import { EngineConfigModel } from "../src/configmodel.js";
import type { Schemas } from "../src/types.js";

const SCHEMAS: Schemas = {
  q_learning: [
    { name: "gamma", type: "continuous", default: 0.95, range: [0.5, 0.999] },
    { name: "alpha", type: "continuous", default: 0.1, range: [0.01, 1.0] },
    { name: "epsilon", type: "continuous", default: 0.1, range: [0, 1] },
  ],
  dyna_q: [
    { name: "gamma", type: "continuous", default: 0.95, range: [0.5, 0.999] },
    { name: "planning_steps", type: "integer", default: 5, range: [0, 50] },
  ],
  random_policy: [],
};

describe("engine config editor", () => {
  it("toggling an agent excludes it from the document", () => {
    const model = new EngineConfigModel(SCHEMAS);
    expect(model.toDocument().enabled_agents).toContain("dyna_q");
    model.toggleAgent("dyna_q");
    expect(model.toDocument().enabled_agents).not.toContain("dyna_q");
    model.toggleAgent("dyna_q");
    expect(model.toDocument().enabled_agents).toContain("dyna_q");
  });

  it("accepts in-range constraint edits", () => {
    const model = new EngineConfigModel(SCHEMAS);
    expect(model.setConstraint("q_learning", "gamma", { range: [0.9, 0.99] })).toBeNull();
    expect(model.toDocument().constraints.q_learning.gamma).toEqual({ range: [0.9, 0.99] });
  });

  it("rejects out-of-range edits inline", () => {
    const model = new EngineConfigModel(SCHEMAS);
    expect(model.setConstraint("q_learning", "gamma", { range: [0.1, 0.9] })).toMatch(/inside/);
    expect(model.setConstraint("q_learning", "gamma", { range: [0.99, 0.9] })).toMatch(/inverted/);
    expect(model.toDocument().constraints.q_learning).toBeUndefined();
  });

  it("rejects unknown parameters and empty value lists", () => {
    const model = new EngineConfigModel(SCHEMAS);
    expect(model.setConstraint("q_learning", "nope", { range: [0, 1] })).toMatch(/unknown/);
    expect(model.setConstraint("dyna_q", "planning_steps", { values: [] })).toBeTruthy();
  });

  it("reset restores defaults", () => {
    const model = new EngineConfigModel(SCHEMAS);
    model.toggleAgent("q_learning");
    model.setConstraint("dyna_q", "gamma", { range: [0.6, 0.7] });
    model.reset();
    const doc = model.toDocument();
    expect(doc.enabled_agents).toEqual(["dyna_q", "q_learning", "random_policy"]);
    expect(doc.constraints).toEqual({});
  });

  it("round-trips through the document form", () => {
    const model = new EngineConfigModel(SCHEMAS);
    model.toggleAgent("random_policy");
    model.candidateBudget = 12;
    model.seed = 42;
    model.setConstraint("q_learning", "epsilon", { range: [0.2, 0.4] });
    const doc = model.toDocument();

    const reloaded = new EngineConfigModel(SCHEMAS);
    reloaded.loadDocument(doc);
    expect(reloaded.toDocument()).toEqual(doc);
  });

  it("constraints of disabled agents are dropped from the document", () => {
    const model = new EngineConfigModel(SCHEMAS);
    model.setConstraint("dyna_q", "gamma", { range: [0.6, 0.7] });
    model.toggleAgent("dyna_q");
    expect(model.toDocument().constraints.dyna_q).toBeUndefined();
  });
});
