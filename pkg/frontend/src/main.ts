// Entry point: wires the controller to the page served at /ui.

import { WorkbenchApi } from "./api.js";
import { WorkbenchController } from "./controller.js";
import {
  renderCandidates,
  renderDiff,
  renderExperiment,
  renderExperimentControl,
  renderGraph,
  renderInspector,
  renderMetrics,
  renderNotice,
  renderPhaseBadge,
  renderTranscript,
} from "./dom.js";
import {
  DEFAULT_CLOUD_STATE,
  DEFAULT_DETECTOR,
  DEFAULT_SCENARIO,
  DEFAULT_SPEC,
  HOUSE_STYLE,
} from "./defaults.js";
import type { PromptSpecData } from "./types.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const api = new WorkbenchApi("");
  let inspected: string | null = null;

  const hooks = {
    onSelectNode: (nodeId: string) => {
      inspected = nodeId;
      renderInspector(byId("inspector"), controller.state, inspected);
    },
    onSelectCandidate: (index: number) => controller.selectCandidate(index),
  };

  const controller = new WorkbenchController(api, (state) => {
    renderPhaseBadge(byId("phase-badge"), state);
    renderTranscript(byId("transcript"), state);
    renderCandidates(byId("candidates"), state, hooks);
    renderGraph(byId("graph"), state, hooks);
    renderInspector(byId("inspector"), state, inspected);
    renderMetrics(byId("metrics"), state);
    renderNotice(byId("notice"), state, () => controller.dismissNotice());
    renderDiff(byId("diff"), state);
    renderExperiment(byId("experiment"), state);
    renderExperimentControl(byId<HTMLButtonElement>("launch-experiment"), state);
  });

  byId<HTMLTextAreaElement>("spec-input").value = JSON.stringify(DEFAULT_SPEC, null, 2);
  byId<HTMLTextAreaElement>("state-input").value = JSON.stringify(DEFAULT_CLOUD_STATE, null, 2);
  byId<HTMLTextAreaElement>("detector-input").value = JSON.stringify(DEFAULT_DETECTOR, null, 2);

  byId("start-session").addEventListener("click", () => {
    const spec = JSON.parse(byId<HTMLTextAreaElement>("spec-input").value) as PromptSpecData;
    void controller.startSession(spec);
  });
  byId("load-session").addEventListener("click", () => {
    const id = byId<HTMLInputElement>("session-id-input").value.trim();
    if (id) void controller.loadSession(id);
  });
  byId("send-insert").addEventListener("click", () => void controller.sendInsertPrompt());
  byId("request-branch").addEventListener("click", () => {
    const component = byId<HTMLInputElement>("component-input").value.trim();
    void controller.requestBranch(component || undefined);
  });
  byId("merge-candidates").addEventListener("click", () => void controller.mergeCandidates());
  byId("apply-style").addEventListener("click", () => {
    void controller.applyStyle(HOUSE_STYLE);
  });
  byId("submit-refinement").addEventListener("click", () => {
    const input = byId<HTMLTextAreaElement>("feedback-input");
    void controller.submitRefinement(input.value).then((applied) => {
      if (applied) input.value = "";
    });
  });
  byId("accept-tree").addEventListener("click", () => void controller.accept());
  byId("launch-experiment").addEventListener("click", () => {
    const goal = byId<HTMLInputElement>("goal-input").value.trim() || "goal";
    const hint = byId<HTMLInputElement>("leaf-hint-input").value.trim();
    const cloudState = JSON.parse(byId<HTMLTextAreaElement>("state-input").value);
    const detector = JSON.parse(byId<HTMLTextAreaElement>("detector-input").value);
    void controller.launchExperiment(goal, hint || undefined, cloudState, detector,
                                     DEFAULT_SCENARIO);
  });
}

document.addEventListener("DOMContentLoaded", main);
