"""Quality scores for attack-defense trees.

Three component scores (technique grounding, branch ordering, usability)
plus their mean, each a percentage rounded half-up to two decimals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path

from .errors import EmptyTreeError, ValidationError
from .model import ADTree, MITRE_ID_RE, NodeKind

DEFAULT_CATALOG_RESOURCE = "attack-catalog.json"


def round2(value: Decimal) -> float:
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _pct(numerator: int, denominator: int) -> float:
    return round2(Decimal(numerator * 100) / Decimal(denominator))


@dataclass
class TechniqueInfo:
    name: str
    tactic: str


@dataclass
class TechniqueCatalog:
    """Vendored snapshot of a technique knowledge base."""

    entries: dict[str, TechniqueInfo]
    snapshot_date: str

    def __post_init__(self):
        if not self.entries:
            raise ValidationError("technique catalog is empty")
        for tid in self.entries:
            if not MITRE_ID_RE.match(tid):
                raise ValidationError(f"catalog technique id '{tid}' is malformed")

    def __contains__(self, technique_id: str) -> bool:
        return technique_id in self.entries

    @classmethod
    def from_dict(cls, data: dict) -> "TechniqueCatalog":
        return cls(
            entries={
                tid: TechniqueInfo(name=info["name"], tactic=info["tactic"])
                for tid, info in data["techniques"].items()
            },
            snapshot_date=data["snapshot_date"],
        )

    @classmethod
    def load(cls, path: str | Path | None = None) -> "TechniqueCatalog":
        """Load from a JSON file, or the bundled snapshot when no path given."""
        if path is None:
            text = resources.files("adforge.data").joinpath(DEFAULT_CATALOG_RESOURCE).read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        return cls.from_dict(json.loads(text))


@dataclass
class ReferenceOrder:
    """Expected attack sequence from an external source (ids or labels)."""

    sequence: list[str]

    def __post_init__(self):
        if len(set(self.sequence)) != len(self.sequence):
            raise ValidationError("reference order entries must be unique")

    @classmethod
    def from_file(cls, path: str | Path) -> "ReferenceOrder":
        lines = [ln.strip() for ln in Path(path).read_text("utf-8").splitlines()]
        return cls([ln for ln in lines if ln and not ln.startswith("#")])

    def resolve(self, tree: ADTree) -> list[str]:
        """Map entries to node ids; unmatched entries are ignored."""
        by_label: dict[str, str] = {}
        for nid in sorted(tree.nodes):
            node = tree.nodes[nid]
            if node.label and node.label not in by_label:
                by_label[node.label] = nid
        resolved = []
        for entry in self.sequence:
            if entry in tree.nodes:
                resolved.append(entry)
            elif entry in by_label:
                resolved.append(by_label[entry])
        seen: set[str] = set()
        return [r for r in resolved if not (r in seen or seen.add(r))]


@dataclass
class NodeFlags:
    m: int = 0
    c: int = 0
    i: int = 0
    r: int = 0
    deviated: bool = False
    childless_nonfinal: bool = False


@dataclass
class MetricReport:
    n: int
    mitre_score: float
    ordered_score: float
    usable_score: float
    tree_score: float
    per_node: dict[str, NodeFlags] = field(default_factory=dict)
    n_d: int = 0
    n_sc: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mitre_score": self.mitre_score,
            "ordered_score": self.ordered_score,
            "usable_score": self.usable_score,
            "tree_score": self.tree_score,
            "n_d": self.n_d,
            "n_sc": self.n_sc,
            "per_node": {
                nid: {
                    "m": f.m,
                    "c": f.c,
                    "i": f.i,
                    "r": f.r,
                    "deviated": f.deviated,
                    "childless_nonfinal": f.childless_nonfinal,
                }
                for nid, f in sorted(self.per_node.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricReport":
        return cls(
            n=data["n"],
            mitre_score=data["mitre_score"],
            ordered_score=data["ordered_score"],
            usable_score=data["usable_score"],
            tree_score=data["tree_score"],
            per_node={nid: NodeFlags(**flags) for nid, flags in data.get("per_node", {}).items()},
            n_d=data.get("n_d", 0),
            n_sc=data.get("n_sc", 0),
        )


def _require_attack_nodes(tree: ADTree) -> list:
    attacks = tree.attack_nodes()
    if not attacks:
        raise EmptyTreeError("tree has no attack nodes; scores divide by their count")
    return attacks


def mitre_score(tree: ADTree, catalog: TechniqueCatalog) -> tuple[float, dict[str, int]]:
    """Share of attack nodes grounded in a cataloged, non-vetoed technique."""
    attacks = _require_attack_nodes(tree)
    flags = {}
    for node in attacks:
        grounded = (
            node.mitre_id is not None
            and node.mitre_id in catalog
            and node.mitre_appropriate is not False
        )
        flags[node.id] = 1 if grounded else 0
    return _pct(sum(flags.values()), len(attacks)), flags


def _lcs_keep(xs: list[str], ys: list[str]) -> set[str]:
    """Members of the earliest-keep longest common subsequence.

    Elements are unique within each sequence. Walking xs left to right, an
    element is kept whenever keeping it still allows a maximum-length
    common subsequence; ties therefore always resolve toward earlier
    branch positions, which pins the deviated-node set canonically.
    """
    n, m = len(xs), len(ys)
    suffix = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if xs[i] == ys[j]:
                suffix[i][j] = suffix[i + 1][j + 1] + 1
            else:
                suffix[i][j] = max(suffix[i + 1][j], suffix[i][j + 1])
    position = {value: idx for idx, value in enumerate(ys)}
    keep: set[str] = set()
    j = 0
    for i, x in enumerate(xs):
        p = position.get(x)
        if p is not None and p >= j and 1 + suffix[i + 1][p + 1] == suffix[i][j]:
            keep.add(x)
            j = p + 1
    return keep


def _deviation_flags(tree: ADTree, reference: ReferenceOrder | None) -> dict[str, bool]:
    """Per attack node: does its branch position disagree with the reference?

    Reference positions are compared per branch via the longest common
    subsequence; off-subsequence nodes count as deviated. Without an
    explicit reference the per-node step annotations stand in; without
    those nothing deviates.
    """
    deviated = {node.id: False for node in tree.attack_nodes()}
    ref_ids = reference.resolve(tree) if reference is not None else None

    for path in tree.maximal_paths():
        in_path = [nid for nid in path if tree.nodes[nid].kind == NodeKind.ATTACK]
        if ref_ids is not None:
            refset = set(ref_ids)
            branch_seq = [nid for nid in in_path if nid in refset]
            ref_seq = [nid for nid in ref_ids if nid in set(in_path)]
        else:
            branch_seq = [nid for nid in in_path if tree.nodes[nid].step_index is not None]
            ref_seq = sorted(branch_seq, key=lambda nid: (tree.nodes[nid].step_index, nid))
        if not branch_seq:
            continue
        keep = _lcs_keep(branch_seq, ref_seq)
        for nid in branch_seq:
            if nid not in keep:
                deviated[nid] = True
    return deviated


def ordered_score(
    tree: ADTree, reference: ReferenceOrder | None = None
) -> tuple[float, int, int, dict[str, bool], dict[str, bool]]:
    """Hierarchy quality: penalizes out-of-order nodes and dead ends."""
    attacks = _require_attack_nodes(tree)
    n = len(attacks)
    children_count = {nid: 0 for nid in tree.nodes}
    for p, _ in tree.edges:
        children_count[p] += 1
    childless = {node.id: children_count[node.id] == 0 for node in attacks}
    deviated = _deviation_flags(tree, reference)
    n_d = sum(deviated.values())
    n_sc = sum(childless.values())
    raw = Decimal((n - (n_d + n_sc)) * 100) / Decimal(n)
    score = round2(max(Decimal(0), min(Decimal(100), raw)))
    return score, n_d, n_sc, deviated, childless


def usable_score(tree: ADTree) -> tuple[float, dict[str, NodeFlags]]:
    """Actionability: commands, input parameters, and expected results."""
    attacks = _require_attack_nodes(tree)
    flags = {}
    for node in attacks:
        flags[node.id] = NodeFlags(
            c=1 if node.commands else 0,
            i=1 if node.inputs else 0,
            r=1 if node.expected_results else 0,
        )
    total = sum(f.c + f.i + f.r for f in flags.values())
    return _pct(total, 3 * len(attacks)), flags


def tree_score(
    tree: ADTree,
    catalog: TechniqueCatalog,
    reference: ReferenceOrder | None = None,
) -> MetricReport:
    """Run all three scorers and assemble the full diagnostic report."""
    m_score, m_flags = mitre_score(tree, catalog)
    o_score, n_d, n_sc, deviated, childless = ordered_score(tree, reference)
    u_score, u_flags = usable_score(tree)

    per_node = {}
    for nid, uf in u_flags.items():
        per_node[nid] = NodeFlags(
            m=m_flags[nid],
            c=uf.c,
            i=uf.i,
            r=uf.r,
            deviated=deviated[nid],
            childless_nonfinal=childless[nid],
        )
    overall = round2(
        (Decimal(str(m_score)) + Decimal(str(o_score)) + Decimal(str(u_score))) / Decimal(3)
    )
    return MetricReport(
        n=len(per_node),
        mitre_score=m_score,
        ordered_score=o_score,
        usable_score=u_score,
        tree_score=overall,
        per_node=per_node,
        n_d=n_d,
        n_sc=n_sc,
    )
