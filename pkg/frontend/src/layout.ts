// Client-side layered DAG layout (Sugiyama-style): longest-path layering,
// a few barycenter ordering sweeps, then fixed-grid coordinates. Every
// node of the tree appears exactly once; nothing is filtered.

import type { NodeKind, TreeData } from "./types.js";

export interface PlacedNode {
  id: string;
  label: string;
  kind: NodeKind;
  x: number;
  y: number;
  fill: string;
  textColor: string;
}

export interface PlacedEdge {
  from: string;
  to: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface GraphLayout {
  nodes: PlacedNode[];
  edges: PlacedEdge[];
  width: number;
  height: number;
}

// Fill colors follow the tree conventions: services dark blue, attacks
// light blue, defenses green, the converging goal gold.
export const KIND_FILLS: Record<NodeKind, string> = {
  root: "#f5f5f5",
  service: "#00008B",
  attack: "#ADD8E6",
  defense: "#90EE90",
  goal: "#FFD700",
};

const KIND_TEXT: Record<NodeKind, string> = {
  root: "#1a1a1a",
  service: "#ffffff",
  attack: "#1a1a1a",
  defense: "#1a1a1a",
  goal: "#1a1a1a",
};

export const NODE_W = 170;
export const NODE_H = 46;
const H_GAP = 26;
const V_GAP = 56;

export function assignLayers(tree: TreeData): Map<string, number> {
  const layers = new Map<string, number>();
  const children = new Map<string, string[]>();
  const indegree = new Map<string, number>();
  for (const id of Object.keys(tree.nodes)) {
    children.set(id, []);
    indegree.set(id, 0);
  }
  for (const [parent, child] of tree.edges) {
    children.get(parent)!.push(child);
    indegree.set(child, (indegree.get(child) ?? 0) + 1);
  }
  // longest path from the root over a topological order
  const queue = Object.keys(tree.nodes).filter((id) => (indegree.get(id) ?? 0) === 0);
  for (const id of queue) layers.set(id, 0);
  while (queue.length > 0) {
    const id = queue.shift()!;
    const depth = layers.get(id) ?? 0;
    for (const kid of children.get(id) ?? []) {
      layers.set(kid, Math.max(layers.get(kid) ?? 0, depth + 1));
      indegree.set(kid, indegree.get(kid)! - 1);
      if (indegree.get(kid) === 0) queue.push(kid);
    }
  }
  return layers;
}

function orderWithinLayers(tree: TreeData, layers: Map<string, number>): string[][] {
  const depth = Math.max(0, ...layers.values());
  const rows: string[][] = Array.from({ length: depth + 1 }, () => []);
  for (const id of Object.keys(tree.nodes).sort()) {
    rows[layers.get(id) ?? 0].push(id);
  }
  const parents = new Map<string, string[]>();
  for (const [parent, child] of tree.edges) {
    if (!parents.has(child)) parents.set(child, []);
    parents.get(child)!.push(parent);
  }
  for (let sweep = 0; sweep < 3; sweep++) {
    for (let level = 1; level < rows.length; level++) {
      const previous = new Map(rows[level - 1].map((id, index) => [id, index]));
      const barycenter = (id: string): number => {
        const ups = (parents.get(id) ?? []).filter((p) => previous.has(p));
        if (ups.length === 0) return previous.size / 2;
        return ups.reduce((sum, p) => sum + previous.get(p)!, 0) / ups.length;
      };
      rows[level] = [...rows[level]].sort(
        (a, b) => barycenter(a) - barycenter(b) || a.localeCompare(b),
      );
    }
  }
  return rows;
}

export function layoutTree(tree: TreeData): GraphLayout {
  const layers = assignLayers(tree);
  const rows = orderWithinLayers(tree, layers);
  const widest = Math.max(1, ...rows.map((row) => row.length));
  const width = widest * (NODE_W + H_GAP) + H_GAP;
  const placed = new Map<string, PlacedNode>();

  rows.forEach((row, level) => {
    const rowWidth = row.length * (NODE_W + H_GAP) - H_GAP;
    const offset = (width - rowWidth) / 2;
    row.forEach((id, index) => {
      const node = tree.nodes[id];
      placed.set(id, {
        id,
        label: node.label || id,
        kind: node.kind,
        x: offset + index * (NODE_W + H_GAP),
        y: V_GAP / 2 + level * (NODE_H + V_GAP),
        fill: KIND_FILLS[node.kind],
        textColor: KIND_TEXT[node.kind],
      });
    });
  });

  const edges: PlacedEdge[] = tree.edges.map(([from, to]) => {
    const a = placed.get(from)!;
    const b = placed.get(to)!;
    return {
      from,
      to,
      x1: a.x + NODE_W / 2,
      y1: a.y + NODE_H,
      x2: b.x + NODE_W / 2,
      y2: b.y,
    };
  });

  return {
    nodes: [...placed.values()],
    edges,
    width,
    height: rows.length * (NODE_H + V_GAP) + V_GAP / 2,
  };
}
