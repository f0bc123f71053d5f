// Scripted browser-session loop against the real service on the mock
// backend: render the fixture, refine, accept, launch the experiment.
// Asserts the UI acceptance conditions: candidate count +1 after the
// refinement, phase done, verdict chip Confirmed, and rendered node count
// equal to the model's node count at every step.

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { WorkbenchApi } from "../src/api.js";
import { WorkbenchController } from "../src/controller.js";
import {
  DEFAULT_CLOUD_STATE,
  DEFAULT_DETECTOR,
  DEFAULT_SCENARIO,
  DEFAULT_SPEC,
  FIXTURE_COMPONENTS,
  FIXTURE_REFINEMENT_FEEDBACK,
  HOUSE_STYLE,
} from "../src/defaults.js";
import { layoutTree } from "../src/layout.js";
import { displayedTree, verdictChip } from "../src/state.js";
import type { WorkbenchState } from "../src/state.js";

const REPO_ROOT = path.resolve(__dirname, "..", "..");
const TRANSCRIPT = path.join(REPO_ROOT, "fixtures", "transcripts", "qwq.json");
const PORT = 18900 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/healthz`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up in time");
}

beforeAll(async () => {
  const stateDir = mkdtempSync(path.join(tmpdir(), "adforge-ui-"));
  service = spawn(
    "python3",
    [
      "-m", "adforge.cli", "serve",
      "--backend", `mock:${TRANSCRIPT}`,
      "--state-dir", stateDir,
      "--host", "127.0.0.1",
      "--port", String(PORT),
    ],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  service.stderr?.on("data", () => {});
  await waitForService();
}, 40_000);

afterAll(() => {
  service?.kill();
});

function renderedNodeCount(state: WorkbenchState): number | null {
  const tree = displayedTree(state);
  if (!tree) return null;
  return layoutTree(tree).nodes.length;
}

function assertRenderMatchesModel(state: WorkbenchState): void {
  const tree = displayedTree(state);
  if (!tree) return;
  expect(renderedNodeCount(state)).toBe(Object.keys(tree.nodes).length);
}

describe("scripted analyst session", () => {
  it("runs the full loop on the mock backend", async () => {
    const controller = new WorkbenchController(new WorkbenchApi(BASE), assertRenderMatchesModel);

    await controller.startSession(DEFAULT_SPEC);
    expect(controller.state.session?.phase).toBe("prompt_context");

    await controller.sendInsertPrompt();
    for (const component of FIXTURE_COMPONENTS) {
      await controller.requestBranch(component);
      expect(controller.state.notice).toBeNull();
    }
    await controller.mergeCandidates();
    await controller.applyStyle(HOUSE_STYLE);

    const merged = displayedTree(controller.state)!;
    expect(Object.keys(merged.nodes)).toHaveLength(26);
    expect(renderedNodeCount(controller.state)).toBe(26);
    const goalParents = merged.edges.filter(([, child]) => child === "goal");
    expect(goalParents).toHaveLength(3);

    // refinement loop: one new candidate, diff shows the inserted step
    const before = controller.state.session!.candidates.length;
    const applied = await controller.submitRefinement(FIXTURE_REFINEMENT_FEEDBACK);
    expect(applied).toBe(true);
    expect(controller.state.session!.candidates.length).toBe(before + 1);
    expect(controller.state.lastDiff?.added).toContain("ec2_listen");
    expect(controller.state.session!.phase).toBe("attack_context");
    assertRenderMatchesModel(controller.state);

    await controller.accept();
    expect(controller.state.session!.phase).toBe("done");
    expect(controller.state.session!.accepted_tree).not.toBeNull();

    await controller.launchExperiment(
      "goal", "ec2_use", DEFAULT_CLOUD_STATE, DEFAULT_DETECTOR, DEFAULT_SCENARIO,
    );
    expect(controller.state.errorPanel).toBeNull();
    expect(verdictChip(controller.state.experimentReport)).toBe("Confirmed");
    expect(controller.state.experimentReport!.stage_results.map((s) => s.action)).toEqual([
      "check_findings",
      "create_spot_instance",
      "start_listener",
      "extract_credentials",
      "use_credentials",
    ]);
  }, 30_000);

  it("keeps stored state intact when a transition is refused", async () => {
    const api = new WorkbenchApi(BASE);
    const controller = new WorkbenchController(api);
    await controller.startSession(DEFAULT_SPEC);
    const id = controller.state.session!.id;

    await controller.mergeCandidates(); // illegal in prompt_context
    expect(controller.state.notice).toBeTruthy();

    const reloaded = await api.getSession(id);
    expect(reloaded.phase).toBe("prompt_context");
    expect(reloaded.candidates).toHaveLength(0);
  }, 30_000);
});
