/** Wire types for the /api/v1 controller surface. */

export interface StateVarDoc {
  name: string;
  kind: "integer" | "real";
  lower: number;
  upper: number;
}

export interface ActionParamDoc {
  name: string;
  values: number[];
}

export interface ActionDoc {
  name: string;
  params: ActionParamDoc[];
}

export interface TransitionRuleDoc {
  action: string;
  assign: Record<string, string>;
}

export interface RewardMetricDoc {
  name: string;
  weight: number;
  expression: string;
}

export interface GymDocument {
  name: string;
  description: string;
  state_vars: StateVarDoc[];
  actions: ActionDoc[];
  transition: TransitionRuleDoc[];
  reward_metrics: RewardMetricDoc[];
  termination: string;
  max_steps: number;
  initial_state: Record<string, number>;
}

export interface JobEvent {
  job_id: string;
  seq: number;
  kind: "log" | "metric" | "candidate_started" | "candidate_finished" | "protocol_chunk" | "status";
  payload: Record<string, unknown>;
  ts: number;
}

export interface Project {
  id: string;
  name: string;
  members: string[];
  created_at: number;
}

export interface JobSummary {
  id: string;
  project_id: string;
  gym_id: string;
  config_id: string;
  status: string;
  result_ref: string | null;
  event_counts?: Record<string, number>;
}

export interface CandidateDoc {
  candidate_id: string;
  agent: string;
  hyperparams: Record<string, number>;
  rank_score: number | null;
  train_steps: number;
  failed: boolean;
  error: string | null;
}

export interface MatrixDoc {
  kind: string;
  labels: string[];
  counts: number[][];
}

export interface ClusteredMatrixDoc {
  matrix: MatrixDoc;
  clustering: { k: number; seed: number; assignment: Record<string, number> };
}

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
  z?: number;
}

export interface TourEdge {
  from: string;
  to: string;
  weight: number;
}

export interface LayoutDoc {
  dims: number;
  nodes: LayoutNode[];
  final_stress: number;
  matrix?: MatrixDoc;
  tour?: TourEdge[];
}

export interface RuleConditionDoc {
  feature: string;
  op: string;
  threshold: number;
}

export interface RuleDoc {
  label: string;
  conditions: RuleConditionDoc[];
  coverage: number;
  precision: number;
}

export interface RuleSetDoc {
  rules: RuleDoc[];
  default_label: string;
  treemap: { rule_index: number | string; weight: number }[];
  rendered?: string[];
}

export interface SchemaParam {
  name: string;
  type: "discrete" | "continuous" | "integer";
  default: number;
  values?: number[];
  range?: [number, number];
}

export type Schemas = Record<string, SchemaParam[]>;

export interface EngineConfigDoc {
  enabled_agents: string[];
  candidate_budget: number;
  episodes_train: number;
  episodes_eval: number;
  top_k: number;
  seed: number;
  search_strategy: "random" | "discrepancy_grid";
  optimization_workers: number;
  constraints: Record<string, Record<string, { values?: number[]; range?: [number, number] }>>;
}

export interface ValidationFinding {
  code: string;
  path: string;
  message?: string;
}
