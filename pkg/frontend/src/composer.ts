/** Gym composer view model: a five-step wizard over an editable draft.
 *
 * The draft mirrors the gym document one to one, so loading a document and
 * serializing the draft back is a field-for-field round trip; the live
 * source pane re-fetches generated code from the API whenever the draft
 * serializes cleanly.
 */

import type {
  ActionDoc,
  GymDocument,
  RewardMetricDoc,
  StateVarDoc,
  TransitionRuleDoc,
  ValidationFinding,
} from "./types.js";

export const WIZARD_STEPS = [
  "state_vars",
  "actions",
  "transition",
  "reward_metrics",
  "termination",
] as const;

export type WizardStep = (typeof WIZARD_STEPS)[number];

export interface ComposerDraft {
  name: string;
  description: string;
  stateVars: StateVarDoc[];
  actions: ActionDoc[];
  transition: TransitionRuleDoc[];
  rewardMetrics: RewardMetricDoc[];
  termination: string;
  maxSteps: number;
  initialState: Record<string, number>;
}

export function emptyDraft(): ComposerDraft {
  return {
    name: "",
    description: "",
    stateVars: [],
    actions: [],
    transition: [],
    rewardMetrics: [],
    termination: "false",
    maxSteps: 100,
    initialState: {},
  };
}

export function fromDocument(document: GymDocument): ComposerDraft {
  return {
    name: document.name,
    description: document.description,
    stateVars: document.state_vars.map((v) => ({ ...v })),
    actions: document.actions.map((a) => ({
      name: a.name,
      params: a.params.map((p) => ({ name: p.name, values: [...p.values] })),
    })),
    transition: document.transition.map((r) => ({
      action: r.action,
      assign: { ...r.assign },
    })),
    rewardMetrics: document.reward_metrics.map((m) => ({ ...m })),
    termination: document.termination,
    maxSteps: document.max_steps,
    initialState: { ...document.initial_state },
  };
}

export function toDocument(draft: ComposerDraft): GymDocument {
  return {
    name: draft.name,
    description: draft.description,
    state_vars: draft.stateVars.map((v) => ({ ...v })),
    actions: draft.actions.map((a) => ({
      name: a.name,
      params: a.params.map((p) => ({ name: p.name, values: [...p.values] })),
    })),
    transition: draft.transition.map((r) => ({ action: r.action, assign: { ...r.assign } })),
    reward_metrics: draft.rewardMetrics.map((m) => ({ ...m })),
    termination: draft.termination,
    max_steps: draft.maxSteps,
    initial_state: { ...draft.initialState },
  };
}

/** Map an API finding path (e.g. "reward_metrics[1].expression") to its step. */
export function stepForFinding(finding: ValidationFinding): WizardStep | "general" {
  for (const step of WIZARD_STEPS) {
    if (finding.path.startsWith(step)) return step;
  }
  if (finding.path.startsWith("initial_state")) return "state_vars";
  if (finding.path.startsWith("max_steps")) return "termination";
  return "general";
}

export class ComposerModel {
  draft: ComposerDraft = emptyDraft();
  step: WizardStep = "state_vars";
  findings: ValidationFinding[] = [];
  source = "";

  load(document: GymDocument): void {
    this.draft = fromDocument(document);
    this.findings = [];
  }

  next(): void {
    const index = WIZARD_STEPS.indexOf(this.step);
    if (index < WIZARD_STEPS.length - 1) this.step = WIZARD_STEPS[index + 1];
  }

  previous(): void {
    const index = WIZARD_STEPS.indexOf(this.step);
    if (index > 0) this.step = WIZARD_STEPS[index - 1];
  }

  findingsForStep(step: WizardStep): ValidationFinding[] {
    return this.findings.filter((f) => stepForFinding(f) === step);
  }

  /** Quick client-side sanity check before calling the API. */
  readyToSubmit(): boolean {
    return (
      this.draft.name.trim().length > 0 &&
      this.draft.stateVars.length > 0 &&
      this.draft.actions.length > 0 &&
      this.draft.rewardMetrics.length > 0 &&
      this.draft.stateVars.every((v) => v.name in this.draft.initialState)
    );
  }
}
