import { describe, expect, it } from "vitest";

import { KIND_FILLS, assignLayers, layoutTree } from "../src/layout.js";
import type { TreeData, TreeNodeData } from "../src/types.js";

function node(kind: TreeNodeData["kind"], label = ""): TreeNodeData {
  return {
    kind,
    label,
    mitre_id: null,
    mitre_appropriate: null,
    commands: [],
    inputs: [],
    expected_results: null,
    step_index: null,
    extras: {},
  };
}

function twoNodeTree(): TreeData {
  return {
    name: "t",
    root: "r",
    nodes: { r: node("root", "Root"), g: node("goal", "Goal") },
    edges: [["r", "g"]],
    style: null,
    graph_attrs: {},
  };
}

function convergingTree(): TreeData {
  const nodes: Record<string, TreeNodeData> = {
    r: node("root"),
    s1: node("service"),
    s2: node("service"),
    a1: node("attack"),
    a2: node("attack"),
    g: node("goal"),
  };
  return {
    name: "t",
    root: "r",
    nodes,
    edges: [
      ["r", "s1"],
      ["r", "s2"],
      ["s1", "a1"],
      ["s2", "a2"],
      ["a1", "g"],
      ["a2", "g"],
    ],
    style: null,
    graph_attrs: {},
  };
}

describe("assignLayers", () => {
  it("uses longest path from the root", () => {
    const layers = assignLayers(convergingTree());
    expect(layers.get("r")).toBe(0);
    expect(layers.get("s1")).toBe(1);
    expect(layers.get("a2")).toBe(2);
    expect(layers.get("g")).toBe(3);
  });
});

describe("layoutTree", () => {
  it("renders a minimal tree with two nodes and one edge", () => {
    const layout = layoutTree(twoNodeTree());
    expect(layout.nodes).toHaveLength(2);
    expect(layout.edges).toHaveLength(1);
  });

  it("places every node exactly once, never filtering", () => {
    const tree = convergingTree();
    const layout = layoutTree(tree);
    expect(layout.nodes.map((n) => n.id).sort()).toEqual(Object.keys(tree.nodes).sort());
    expect(layout.edges).toHaveLength(tree.edges.length);
  });

  it("keeps the converging goal's in-degree visible", () => {
    const layout = layoutTree(convergingTree());
    const intoGoal = layout.edges.filter((e) => e.to === "g");
    expect(intoGoal).toHaveLength(2);
  });

  it("separates nodes within a layer", () => {
    const layout = layoutTree(convergingTree());
    const layerOne = layout.nodes.filter((n) => n.id === "s1" || n.id === "s2");
    expect(layerOne[0].y).toBe(layerOne[1].y);
    expect(layerOne[0].x).not.toBe(layerOne[1].x);
  });

  it("colors nodes by kind following the tree conventions", () => {
    const layout = layoutTree(convergingTree());
    const byId = new Map(layout.nodes.map((n) => [n.id, n]));
    expect(byId.get("s1")!.fill).toBe(KIND_FILLS.service);
    expect(byId.get("a1")!.fill).toBe(KIND_FILLS.attack);
    expect(byId.get("g")!.fill).toBe(KIND_FILLS.goal);
    expect(KIND_FILLS.service).toBe("#00008B");
    expect(KIND_FILLS.attack).toBe("#ADD8E6");
  });

  it("falls back to the id when a label is empty", () => {
    const layout = layoutTree(convergingTree());
    expect(layout.nodes.find((n) => n.id === "a1")!.label).toBe("a1");
  });
});
