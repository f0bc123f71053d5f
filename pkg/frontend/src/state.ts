// View model derived purely from service responses. The UI never invents
// or mutates tree data; it re-renders whatever the service returned last.

import type {
  CandidateData,
  ExperimentReportData,
  NodeFlags,
  SessionData,
  TreeData,
} from "./types.js";

export interface NodeInspection {
  id: string;
  label: string;
  kind: string;
  mitreId: string | null;
  commands: string[];
  inputs: string[];
  expectedResults: string | null;
  flags: NodeFlags | null;
}

export interface CandidateSummary {
  index: number;
  originPhase: string;
  nodeCount: number;
  attackCount: number;
  treeScore: number | null;
}

export interface DiffSummary {
  added: string[];
  removed: string[];
}

export interface WorkbenchState {
  session: SessionData | null;
  selectedCandidate: number;
  notice: string | null;
  errorPanel: { message: string; nodeIds: string[] } | null;
  experimentReport: ExperimentReportData | null;
  lastDiff: DiffSummary | null;
}

export function initialState(): WorkbenchState {
  return {
    session: null,
    selectedCandidate: -1,
    notice: null,
    errorPanel: null,
    experimentReport: null,
    lastDiff: null,
  };
}

export function currentCandidate(state: WorkbenchState): CandidateData | null {
  const session = state.session;
  if (!session || session.candidates.length === 0) return null;
  const index = state.selectedCandidate >= 0 &&
    state.selectedCandidate < session.candidates.length
    ? state.selectedCandidate
    : session.candidates.length - 1;
  return session.candidates[index];
}

export function displayedTree(state: WorkbenchState): TreeData | null {
  if (state.session?.accepted_tree) return state.session.accepted_tree;
  return currentCandidate(state)?.tree ?? null;
}

export function phaseBadge(state: WorkbenchState): string {
  return state.session?.phase ?? "no session";
}

export function candidateSummaries(session: SessionData): CandidateSummary[] {
  return session.candidates.map((candidate, index) => {
    const nodes = Object.values(candidate.tree.nodes);
    return {
      index,
      originPhase: candidate.origin_phase,
      nodeCount: nodes.length,
      attackCount: nodes.filter((n) => n.kind === "attack").length,
      treeScore: candidate.metric_report?.tree_score ?? null,
    };
  });
}

export function inspectNode(candidate: CandidateData, nodeId: string): NodeInspection | null {
  const node = candidate.tree.nodes[nodeId];
  if (!node) return null;
  return {
    id: nodeId,
    label: node.label || nodeId,
    kind: node.kind,
    mitreId: node.mitre_id,
    commands: node.commands,
    inputs: node.inputs,
    expectedResults: node.expected_results,
    flags: candidate.metric_report?.per_node[nodeId] ?? null,
  };
}

export function nonGroundedNodeIds(candidate: CandidateData): string[] {
  const report = candidate.metric_report;
  if (!report) return [];
  return Object.entries(report.per_node)
    .filter(([, flags]) => flags.m === 0)
    .map(([id]) => id)
    .sort();
}

export function diffTrees(before: TreeData | null, after: TreeData | null): DiffSummary {
  const beforeIds = new Set(Object.keys(before?.nodes ?? {}));
  const afterIds = new Set(Object.keys(after?.nodes ?? {}));
  return {
    added: [...afterIds].filter((id) => !beforeIds.has(id)).sort(),
    removed: [...beforeIds].filter((id) => !afterIds.has(id)).sort(),
  };
}

export function experimentControlEnabled(state: WorkbenchState): boolean {
  return state.session?.phase === "done" && state.session.accepted_tree !== null;
}

export function verdictChip(report: ExperimentReportData | null): string {
  if (!report) return "";
  const labels = { confirmed: "Confirmed", refuted: "Refuted", inconclusive: "Inconclusive" };
  return labels[report.hypothesis_verdict];
}
