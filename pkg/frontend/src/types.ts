// Wire types mirrored from the service's JSON schema (schema_version 1).

export type NodeKind = "root" | "service" | "attack" | "defense" | "goal";

export interface TreeNodeData {
  kind: NodeKind;
  label: string;
  mitre_id: string | null;
  mitre_appropriate: boolean | null;
  commands: string[];
  inputs: string[];
  expected_results: string | null;
  step_index: number | null;
  extras: Record<string, string>;
}

export interface TreeData {
  name: string;
  root: string;
  nodes: Record<string, TreeNodeData>;
  edges: [string, string][];
  style: string | null;
  graph_attrs: Record<string, string>;
}

export interface NodeFlags {
  m: 0 | 1;
  c: 0 | 1;
  i: 0 | 1;
  r: 0 | 1;
  deviated: boolean;
  childless_nonfinal: boolean;
}

export interface MetricReportData {
  n: number;
  mitre_score: number;
  ordered_score: number;
  usable_score: number;
  tree_score: number;
  n_d: number;
  n_sc: number;
  per_node: Record<string, NodeFlags>;
}

export type Phase =
  | "app_sec_context"
  | "prompt_context"
  | "insert_prompt"
  | "attack_context"
  | "cosmetic_context"
  | "expert_validation"
  | "done";

export interface CandidateData {
  tree: TreeData;
  origin_phase: Phase;
  metric_report: MetricReportData | null;
}

export interface TranscriptTurn {
  role: "user" | "assistant";
  text: string;
}

export interface SessionData {
  id: string;
  phase: Phase;
  spec: unknown;
  transcript: TranscriptTurn[];
  candidates: CandidateData[];
  accepted_tree: TreeData | null;
  iteration_count: number;
}

export interface PromptSpecData {
  system_context: string;
  components: { technology: string; safeguards: string[] }[];
  attack_goals: string[];
  tree_root: string;
}

export interface StageResultData {
  name: string;
  action: string;
  status: "success" | "blocked" | "error";
  observed: string;
}

export interface ExperimentReportData {
  experiment: string;
  steady_state_before: Record<string, boolean>;
  stage_results: StageResultData[];
  detector_findings_emitted: { type: string; severity: string; timestamp: string }[];
  hypothesis_verdict: "confirmed" | "refuted" | "inconclusive";
}

export interface ExperimentData {
  name: string;
  observability: string;
  steady_state: string[];
  hypothesis: { text: string; expected_finding: string };
  stages: { name: string; action: string; params: Record<string, string>; expected: string }[];
  source_branch: string[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: Record<string, unknown>;
}
