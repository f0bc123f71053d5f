// DOM rendering: translates the view model into the page. Rebuilt wholesale
// on every state change; the graph is plain SVG so nodes stay inspectable.

import { GraphLayout, NODE_H, NODE_W, layoutTree } from "./layout.js";
import {
  WorkbenchState,
  candidateSummaries,
  currentCandidate,
  displayedTree,
  experimentControlEnabled,
  inspectNode,
  nonGroundedNodeIds,
  phaseBadge,
  verdictChip,
} from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ViewHooks {
  onSelectNode: (nodeId: string) => void;
  onSelectCandidate: (index: number) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(target: HTMLElement): HTMLElement {
  target.replaceChildren();
  return target;
}

export function renderPhaseBadge(target: HTMLElement, state: WorkbenchState): void {
  target.textContent = phaseBadge(state);
  target.dataset.phase = state.session?.phase ?? "";
}

export function renderTranscript(target: HTMLElement, state: WorkbenchState): void {
  clear(target);
  for (const turn of state.session?.transcript ?? []) {
    const entry = el("div", `turn turn-${turn.role}`);
    entry.append(el("span", "turn-role", turn.role), el("pre", "turn-text", turn.text));
    target.append(entry);
  }
  target.scrollTop = target.scrollHeight;
}

export function renderCandidates(target: HTMLElement, state: WorkbenchState,
                                 hooks: ViewHooks): void {
  clear(target);
  const session = state.session;
  if (!session) return;
  candidateSummaries(session).forEach((summary) => {
    const row = el("button", "candidate-row");
    row.type = "button";
    const score = summary.treeScore === null ? "unscored" : summary.treeScore.toFixed(2);
    row.textContent =
      `#${summary.index + 1} ${summary.originPhase} — ${summary.nodeCount} nodes, ` +
      `${summary.attackCount} attacks, score ${score}`;
    row.addEventListener("click", () => hooks.onSelectCandidate(summary.index));
    target.append(row);
  });
}

export function renderGraph(target: HTMLElement, state: WorkbenchState,
                            hooks: ViewHooks): GraphLayout | null {
  clear(target);
  const tree = displayedTree(state);
  if (!tree) {
    target.append(el("p", "placeholder", "No tree yet — request a branch."));
    return null;
  }
  let layout: GraphLayout;
  try {
    layout = layoutTree(tree);
  } catch {
    // fallback: the raw DOT-ish dump rather than a broken canvas
    const pre = el("pre", "raw-fallback", JSON.stringify(tree, null, 2));
    target.append(pre);
    return null;
  }
  const candidate = currentCandidate(state);
  const dim = candidate ? new Set(nonGroundedNodeIds(candidate)) : new Set<string>();

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("width", String(layout.width));
  svg.setAttribute("height", String(layout.height));

  for (const edge of layout.edges) {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(edge.x1));
    line.setAttribute("y1", String(edge.y1));
    line.setAttribute("x2", String(edge.x2));
    line.setAttribute("y2", String(edge.y2));
    line.setAttribute("class", "edge");
    svg.append(line);
  }
  for (const node of layout.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("class", `node kind-${node.kind}${dim.has(node.id) ? " ungrounded" : ""}`);
    group.setAttribute("data-node-id", node.id);
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(node.x));
    rect.setAttribute("y", String(node.y));
    rect.setAttribute("width", String(NODE_W));
    rect.setAttribute("height", String(NODE_H));
    rect.setAttribute("rx", "6");
    rect.setAttribute("fill", node.fill);
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(node.x + NODE_W / 2));
    text.setAttribute("y", String(node.y + NODE_H / 2 + 4));
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("fill", node.textColor);
    text.textContent = node.label.length > 24 ? node.label.slice(0, 23) + "…" : node.label;
    group.append(rect, text);
    group.addEventListener("click", () => hooks.onSelectNode(node.id));
    svg.append(group);
  }
  target.append(svg);
  return layout;
}

export function renderInspector(target: HTMLElement, state: WorkbenchState,
                                nodeId: string | null): void {
  clear(target);
  const candidate = currentCandidate(state);
  if (!candidate || !nodeId) {
    target.append(el("p", "placeholder", "Click a node to inspect it."));
    return;
  }
  const info = inspectNode(candidate, nodeId);
  if (!info) return;
  target.append(el("h3", undefined, info.label));
  const rows: [string, string][] = [
    ["kind", info.kind],
    ["technique", info.mitreId ?? "—"],
    ["commands", info.commands.join("\n") || "—"],
    ["inputs", info.inputs.join("\n") || "—"],
    ["expected", info.expectedResults ?? "—"],
  ];
  if (info.flags) {
    rows.push(["flags", `m=${info.flags.m} c=${info.flags.c} i=${info.flags.i} r=${info.flags.r}`]);
  }
  const list = el("dl", "inspector-list");
  for (const [name, value] of rows) {
    list.append(el("dt", undefined, name), el("dd", undefined, value));
  }
  target.append(list);
}

export function renderMetrics(target: HTMLElement, state: WorkbenchState): void {
  clear(target);
  const report = currentCandidate(state)?.metric_report;
  if (!report) {
    target.append(el("p", "placeholder", "No scores yet."));
    return;
  }
  const rows: [string, string][] = [
    ["technique grounding", report.mitre_score.toFixed(2)],
    ["ordering", report.ordered_score.toFixed(2)],
    ["usability", report.usable_score.toFixed(2)],
    ["overall", report.tree_score.toFixed(2)],
  ];
  const table = el("table", "metrics-table");
  for (const [name, value] of rows) {
    const tr = el("tr");
    tr.append(el("td", undefined, name), el("td", "metric-value", value));
    table.append(tr);
  }
  target.append(table);
}

export function renderNotice(target: HTMLElement, state: WorkbenchState,
                             onDismiss: () => void): void {
  clear(target);
  if (!state.notice) {
    target.classList.add("hidden");
    return;
  }
  target.classList.remove("hidden");
  target.append(el("span", undefined, state.notice));
  const close = el("button", "dismiss", "×");
  close.type = "button";
  close.addEventListener("click", onDismiss);
  target.append(close);
}

export function renderDiff(target: HTMLElement, state: WorkbenchState): void {
  clear(target);
  const diff = state.lastDiff;
  if (!diff || (diff.added.length === 0 && diff.removed.length === 0)) {
    target.classList.add("hidden");
    return;
  }
  target.classList.remove("hidden");
  target.append(el("h3", undefined, "Last refinement"));
  if (diff.added.length) target.append(el("p", "diff-added", `added: ${diff.added.join(", ")}`));
  if (diff.removed.length) {
    target.append(el("p", "diff-removed", `removed: ${diff.removed.join(", ")}`));
  }
}

export function renderExperiment(target: HTMLElement, state: WorkbenchState): void {
  clear(target);
  if (state.errorPanel) {
    const panel = el("div", "error-panel");
    panel.append(el("h3", undefined, "Branch not usable"));
    panel.append(el("p", undefined, state.errorPanel.message));
    if (state.errorPanel.nodeIds.length) {
      const list = el("ul");
      for (const id of state.errorPanel.nodeIds) list.append(el("li", undefined, id));
      panel.append(list);
    }
    target.append(panel);
    return;
  }
  const report = state.experimentReport;
  if (!report) {
    target.append(el("p", "placeholder", "No experiment run yet."));
    return;
  }
  const chip = el("span", `verdict-chip verdict-${report.hypothesis_verdict}`,
                  verdictChip(report));
  target.append(chip);
  const timeline = el("ol", "stage-timeline");
  for (const stage of report.stage_results) {
    const item = el("li", `stage stage-${stage.status}`);
    item.append(
      el("span", "stage-name", stage.name),
      el("span", "stage-status", stage.status),
      el("span", "stage-observed", stage.observed),
    );
    timeline.append(item);
  }
  target.append(timeline);
  if (report.detector_findings_emitted.length) {
    const findings = el("p", "findings",
      "findings: " + report.detector_findings_emitted.map((f) => f.type).join(", "));
    target.append(findings);
  }
}

export function renderExperimentControl(button: HTMLButtonElement,
                                        state: WorkbenchState): void {
  button.disabled = !experimentControlEnabled(state);
}
