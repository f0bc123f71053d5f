"""Attack-defense tree data model: nodes, trees, branches, validation.

The structure is a single-root DAG. Branches fan out from the root through
service and attack nodes and converge on goal nodes, which are the only
nodes allowed more than one parent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import NotFoundError, StructureError, ValidationError

MITRE_ID_RE = re.compile(r"^T\d{4}(?:\.\d{3})?$")
HEX_COLOR_RE = re.compile(r"^#[0-9a-fA-F]{6}$")
COLOR_NAME_RE = re.compile(r"^[a-zA-Z][a-zA-Z0-9]*$")


class NodeKind(str, Enum):
    ROOT = "root"
    SERVICE = "service"
    ATTACK = "attack"
    DEFENSE = "defense"
    GOAL = "goal"


# DOT attribute names with defined meaning; everything else passes through.
RESERVED_ATTRS = (
    "adtkind",
    "label",
    "mitre",
    "mitre_ok",
    "cmd",
    "inputs",
    "expect",
    "step",
    "fillcolor",
    "fontname",
    "fontsize",
)

LIST_SEPARATOR = ";;"

STYLE_ATTRS = ("fillcolor", "fontname", "fontsize")


@dataclass
class StyleSheet:
    """Per-kind rendering attributes (fillcolor / fontname / fontsize)."""

    kinds: dict[NodeKind, dict[str, str]] = field(default_factory=dict)

    def validate(self) -> None:
        for kind, attrs in self.kinds.items():
            for name, value in attrs.items():
                if name not in STYLE_ATTRS:
                    raise ValidationError(f"stylesheet: unknown attribute '{name}' for {kind.value}")
                if name == "fillcolor" and not (HEX_COLOR_RE.match(value) or COLOR_NAME_RE.match(value)):
                    raise ValidationError(f"stylesheet: '{value}' is not a hex color or DOT color name")

    def for_kind(self, kind: NodeKind) -> dict[str, str]:
        return self.kinds.get(kind, {})

    def to_attr(self) -> str:
        """Serialize to the single `adtstyle` DOT graph attribute."""
        parts = []
        for kind in sorted(self.kinds, key=lambda k: k.value):
            attrs = self.kinds[kind]
            inner = ",".join(f"{a}={attrs[a]}" for a in STYLE_ATTRS if a in attrs)
            if inner:
                parts.append(f"{kind.value}:{inner}")
        return ";".join(parts)

    def to_dict(self) -> dict:
        return {kind.value: dict(attrs) for kind, attrs in sorted(self.kinds.items(), key=lambda kv: kv[0].value)}

    @classmethod
    def from_dict(cls, data: dict) -> "StyleSheet":
        try:
            kinds = {NodeKind(k): {a: str(v) for a, v in attrs.items()} for k, attrs in data.items()}
        except ValueError as exc:
            raise ValidationError(f"stylesheet: {exc}") from None
        sheet = cls(kinds)
        sheet.validate()
        return sheet

    @classmethod
    def from_attr(cls, text: str) -> "StyleSheet":
        kinds: dict[NodeKind, dict[str, str]] = {}
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            if ":" not in part:
                raise ValidationError(f"stylesheet attribute: bad clause '{part}'")
            kind_s, _, inner = part.partition(":")
            try:
                kind = NodeKind(kind_s.strip())
            except ValueError:
                raise ValidationError(f"stylesheet attribute: unknown kind '{kind_s}'") from None
            attrs = {}
            for pair in inner.split(","):
                if not pair.strip():
                    continue
                name, _, value = pair.partition("=")
                attrs[name.strip()] = value.strip()
            kinds[kind] = attrs
        sheet = cls(kinds)
        sheet.validate()
        return sheet


@dataclass
class ADNode:
    """One node of an attack-defense tree."""

    id: str
    kind: NodeKind
    label: str = ""
    mitre_id: str | None = None
    mitre_appropriate: bool | None = None
    commands: list[str] = field(default_factory=list)
    inputs: list[str] = field(default_factory=list)
    expected_results: str | None = None
    step_index: int | None = None
    extras: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.id:
            raise StructureError("node with empty id")
        if self.mitre_id is not None and not MITRE_ID_RE.match(self.mitre_id):
            raise StructureError(f"node '{self.id}': malformed technique id '{self.mitre_id}'")
        if self.kind in (NodeKind.ROOT, NodeKind.GOAL):
            if self.mitre_id is not None:
                raise StructureError(f"{self.kind.value} node '{self.id}' must not carry a technique id")
            if self.commands:
                raise StructureError(f"{self.kind.value} node '{self.id}' must not carry commands")
            if self.step_index is not None:
                raise StructureError(f"{self.kind.value} node '{self.id}' must not carry a step index")
        if self.step_index is not None and self.step_index < 0:
            raise StructureError(f"node '{self.id}': negative step index")


@dataclass
class ADTree:
    """Validated single-root DAG with converging goal nodes."""

    nodes: dict[str, ADNode]
    edges: list[tuple[str, str]]
    root: str
    style: StyleSheet | None = None
    name: str = "adtree"
    graph_attrs: dict[str, str] = field(default_factory=dict)

    # -- structure helpers ------------------------------------------------

    def children(self, node_id: str) -> list[str]:
        return [c for p, c in self.edges if p == node_id]

    def parents(self, node_id: str) -> list[str]:
        return [p for p, c in self.edges if c == node_id]

    def attack_nodes(self) -> list[ADNode]:
        return [n for n in self.nodes.values() if n.kind == NodeKind.ATTACK]

    def goal_ids(self) -> list[str]:
        return sorted(n.id for n in self.nodes.values() if n.kind == NodeKind.GOAL)

    def maximal_paths(self) -> list[list[str]]:
        """All root-to-leaf paths, children visited in sorted order."""
        children: dict[str, list[str]] = {nid: [] for nid in self.nodes}
        for p, c in self.edges:
            children[p].append(c)
        for lst in children.values():
            lst.sort()
        paths: list[list[str]] = []

        def walk(node_id: str, trail: list[str]) -> None:
            trail = trail + [node_id]
            kids = children[node_id]
            if not kids:
                paths.append(trail)
                return
            seen = set()
            for kid in kids:
                if kid in seen:
                    continue
                seen.add(kid)
                walk(kid, trail)

        walk(self.root, [])
        return paths

    # -- validation --------------------------------------------------------

    def validate(self) -> None:
        if not self.nodes:
            raise StructureError("tree has no nodes")
        for nid, node in self.nodes.items():
            if nid != node.id:
                raise StructureError(f"node key '{nid}' disagrees with node id '{node.id}'")
            node.validate()
        for p, c in self.edges:
            if p not in self.nodes:
                raise StructureError(f"edge ({p} -> {c}): unknown parent '{p}'")
            if c not in self.nodes:
                raise StructureError(f"edge ({p} -> {c}): unknown child '{c}'")

        roots = [n.id for n in self.nodes.values() if n.kind == NodeKind.ROOT]
        if len(roots) != 1:
            raise StructureError(f"expected exactly one root node, found {len(roots)}: {sorted(roots)}")
        if self.root != roots[0]:
            raise StructureError(f"root field '{self.root}' does not name the root node '{roots[0]}'")

        indeg: dict[str, int] = {nid: 0 for nid in self.nodes}
        for _, c in self.edges:
            indeg[c] += 1
        for nid, node in self.nodes.items():
            if node.kind != NodeKind.GOAL and indeg[nid] > 1:
                raise StructureError(f"node '{nid}' has in-degree {indeg[nid]} but is not a goal")
        if indeg[self.root] != 0:
            raise StructureError(f"root node '{self.root}' has incoming edges")

        self._check_acyclic()
        self._check_reachable()
        if self.style is not None:
            self.style.validate()

    def _check_acyclic(self) -> None:
        children: dict[str, list[str]] = {nid: [] for nid in self.nodes}
        for p, c in self.edges:
            children[p].append(c)
        WHITE, GREY, BLACK = 0, 1, 2
        color = {nid: WHITE for nid in self.nodes}

        def visit(nid: str, trail: list[str]) -> None:
            color[nid] = GREY
            for kid in children[nid]:
                if color[kid] == GREY:
                    cycle = trail[trail.index(kid):] if kid in trail else [nid]
                    raise StructureError(f"cycle through node '{kid}': {' -> '.join(cycle + [kid])}")
                if color[kid] == WHITE:
                    visit(kid, trail + [kid])
            color[nid] = BLACK

        for nid in sorted(self.nodes):
            if color[nid] == WHITE:
                visit(nid, [nid])

    def _check_reachable(self) -> None:
        children: dict[str, list[str]] = {nid: [] for nid in self.nodes}
        for p, c in self.edges:
            children[p].append(c)
        seen = {self.root}
        stack = [self.root]
        while stack:
            for kid in children[stack.pop()]:
                if kid not in seen:
                    seen.add(kid)
                    stack.append(kid)
        orphans = sorted(set(self.nodes) - seen)
        if orphans:
            raise StructureError(f"nodes unreachable from root: {', '.join(orphans)}")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "root": self.root,
            "nodes": {
                nid: {
                    "kind": n.kind.value,
                    "label": n.label,
                    "mitre_id": n.mitre_id,
                    "mitre_appropriate": n.mitre_appropriate,
                    "commands": list(n.commands),
                    "inputs": list(n.inputs),
                    "expected_results": n.expected_results,
                    "step_index": n.step_index,
                    "extras": dict(n.extras),
                }
                for nid, n in sorted(self.nodes.items())
            },
            "edges": [[p, c] for p, c in self.edges],
            "style": self.style.to_attr() if self.style else None,
            "graph_attrs": dict(self.graph_attrs),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ADTree":
        nodes = {}
        for nid, nd in data["nodes"].items():
            nodes[nid] = ADNode(
                id=nid,
                kind=NodeKind(nd["kind"]),
                label=nd.get("label", ""),
                mitre_id=nd.get("mitre_id"),
                mitre_appropriate=nd.get("mitre_appropriate"),
                commands=list(nd.get("commands", [])),
                inputs=list(nd.get("inputs", [])),
                expected_results=nd.get("expected_results"),
                step_index=nd.get("step_index"),
                extras=dict(nd.get("extras", {})),
            )
        style = StyleSheet.from_attr(data["style"]) if data.get("style") else None
        tree = cls(
            nodes=nodes,
            edges=[(p, c) for p, c in data["edges"]],
            root=data["root"],
            style=style,
            name=data.get("name", "adtree"),
            graph_attrs=dict(data.get("graph_attrs", {})),
        )
        tree.validate()
        return tree


def trees_equal(a: ADTree, b: ADTree) -> bool:
    """Semantic equality: node set with all annotations, edge multiset, style."""
    if set(a.nodes) != set(b.nodes):
        return False
    if any(a.nodes[nid] != b.nodes[nid] for nid in a.nodes):
        return False
    if sorted(a.edges) != sorted(b.edges):
        return False
    a_style = a.style.to_attr() if a.style else ""
    b_style = b.style.to_attr() if b.style else ""
    return a.root == b.root and a_style == b_style and a.graph_attrs == b.graph_attrs


@dataclass
class Branch:
    """One root-to-goal path; the compilation unit for experiments."""

    node_ids: list[str]
    source_tree: str

    def validate(self, tree: ADTree) -> None:
        if len(self.node_ids) < 2:
            raise StructureError("branch must span at least root and goal")
        if self.node_ids[0] != tree.root:
            raise StructureError("branch does not start at the root")
        if tree.nodes[self.node_ids[-1]].kind != NodeKind.GOAL:
            raise StructureError("branch does not end at a goal node")
        edge_set = set(tree.edges)
        for p, c in zip(self.node_ids, self.node_ids[1:]):
            if (p, c) not in edge_set:
                raise StructureError(f"branch step ({p} -> {c}) is not an edge")


def _chain_to_root(tree: ADTree, node_id: str) -> list[str]:
    """Unique root path for a non-goal node (in-degree <= 1 above it)."""
    chain = [node_id]
    current = node_id
    while current != tree.root:
        parents = sorted(tree.parents(current))
        if not parents:
            break
        current = parents[0]
        chain.append(current)
    chain.reverse()
    return chain


def extract_branch(tree: ADTree, goal_id: str, leaf_hint: str | None = None) -> Branch:
    """Select one root-to-goal path, steered by a hint node when given.

    Among the goal's parents, the hint picks the one whose root chain shares
    the most nodes with the hint's own chain; ties and the no-hint case fall
    back to the lexicographically-first path.
    """
    if goal_id not in tree.nodes:
        raise NotFoundError(f"no node '{goal_id}' in tree")
    if tree.nodes[goal_id].kind != NodeKind.GOAL:
        raise ValidationError(f"node '{goal_id}' is not a goal node")
    if leaf_hint is not None and leaf_hint not in tree.nodes:
        raise NotFoundError(f"no node '{leaf_hint}' in tree")

    candidates = []
    for parent in sorted(set(tree.parents(goal_id))):
        candidates.append(_chain_to_root(tree, parent) + [goal_id])
    if not candidates:
        raise StructureError(f"goal '{goal_id}' has no incoming edges")

    if leaf_hint is not None and leaf_hint != goal_id:
        hint_chain = set(_chain_to_root(tree, leaf_hint))
        best = max(len(hint_chain.intersection(path)) for path in candidates)
        candidates = [p for p in candidates if len(hint_chain.intersection(p)) == best]

    branch = Branch(node_ids=min(candidates), source_tree=tree.name)
    branch.validate(tree)
    return branch


def merge_trees(trees: list[ADTree], root_label: str) -> ADTree:
    """Combine branch trees under a fresh root, unifying same-label goals.

    Input roots are dropped and their children re-parented; colliding node
    ids get a numeric suffix; goal nodes sharing a label collapse into one
    converging goal.
    """
    if not trees:
        raise ValidationError("merge requires at least one tree")
    for t in trees:
        t.validate()

    merged_nodes: dict[str, ADNode] = {}
    merged_edges: list[tuple[str, str]] = []
    goal_by_label: dict[str, str] = {}
    collisions: dict[str, int] = {}

    def allocate(node_id: str) -> str:
        if node_id not in merged_nodes and node_id != "root":
            return node_id
        collisions[node_id] = collisions.get(node_id, 0) + 1
        candidate = f"{node_id}_{collisions[node_id]}"
        while candidate in merged_nodes:
            collisions[node_id] += 1
            candidate = f"{node_id}_{collisions[node_id]}"
        return candidate

    root = ADNode(id="root", kind=NodeKind.ROOT, label=root_label)
    merged_nodes["root"] = root

    for tree in trees:
        rename: dict[str, str] = {}
        for nid in sorted(set(tree.nodes) - {tree.root}):
            node = tree.nodes[nid]
            if node.kind == NodeKind.GOAL and node.label in goal_by_label:
                rename[nid] = goal_by_label[node.label]
                continue
            new_id = allocate(nid)
            rename[nid] = new_id
            merged_nodes[new_id] = replace(
                node,
                id=new_id,
                commands=list(node.commands),
                inputs=list(node.inputs),
                extras=dict(node.extras),
            )
            if node.kind == NodeKind.GOAL:
                goal_by_label[node.label] = new_id
        for p, c in tree.edges:
            if p == tree.root:
                merged_edges.append(("root", rename[c]))
            else:
                merged_edges.append((rename[p], rename[c]))

    style = next((t.style for t in trees if t.style is not None), None)
    merged = ADTree(
        nodes=merged_nodes,
        edges=merged_edges,
        root="root",
        style=style,
    )
    merged.validate()
    return merged
