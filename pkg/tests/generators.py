"""Seeded random generators for valid trees and references."""

from __future__ import annotations

import random

from adforge.metrics import ReferenceOrder
from adforge.model import ADNode, ADTree, NodeKind, StyleSheet

REAL_TECHNIQUES = ["T1078", "T1110", "T1552.005", "T1566", "T1078.004", "T1087.004"]
FAKE_TECHNIQUES = ["T1990", "T1991", "T1992.001", "T2001"]

LABEL_WORDS = [
    "probe", "pivot", "escalate", "harvest", "stage", "listener", "bucket",
    "review", "token", "payload", "snapshot", "rollback", 'quo"ted', "uniçode",
]

COMMANDS = [
    "aws iam list-users",
    "curl http://169.254.169.254/latest/meta-data/",
    "nc -lvnp 4444",
    "aws ec2 request-spot-instances --dry-run",
    "python3 exploit.py --target host",
]

EXTRA_KEYS = ["shape", "tooltip", "penwidth", "group"]
FONT_NAMES = ["Helvetica", "Courier", "Times"]
FILLS = ["#ADD8E6", "#00008B", "#90EE90", "gold", "tomato"]


def _label(rng: random.Random) -> str:
    return " ".join(rng.sample(LABEL_WORDS, rng.randint(1, 3)))


def _annotate_attack(rng: random.Random, node: ADNode, step: int | None) -> None:
    roll = rng.random()
    if roll < 0.4:
        node.mitre_id = rng.choice(REAL_TECHNIQUES)
    elif roll < 0.7:
        node.mitre_id = rng.choice(FAKE_TECHNIQUES)
    if node.mitre_id and rng.random() < 0.25:
        node.mitre_appropriate = rng.random() < 0.5
    if rng.random() < 0.75:
        node.commands = rng.sample(COMMANDS, rng.randint(1, 2))
    if rng.random() < 0.7:
        node.inputs = [f"arg{i}=v{rng.randint(0, 9)}" for i in range(rng.randint(1, 2))]
    if rng.random() < 0.7:
        node.expected_results = _label(rng)
    if step is not None and rng.random() < 0.8:
        node.step_index = step
    if rng.random() < 0.3:
        node.extras[rng.choice(EXTRA_KEYS)] = _label(rng)


def random_tree(rng: random.Random, max_nodes: int = 12) -> ADTree:
    """A valid tree with 1..max_nodes-3 attack nodes and assorted shapes."""
    nodes: dict[str, ADNode] = {}
    edges: list[tuple[str, str]] = []
    counter = 0

    def new_id() -> str:
        nonlocal counter
        counter += 1
        return f"n{counter}" if rng.random() < 0.8 else f"node {counter}"

    root_id = new_id()
    nodes[root_id] = ADNode(id=root_id, kind=NodeKind.ROOT, label=_label(rng))

    budget = rng.randint(1, max_nodes - 3)
    attach_points = [root_id]
    if rng.random() < 0.6:
        svc_id = new_id()
        nodes[svc_id] = ADNode(id=svc_id, kind=NodeKind.SERVICE, label=_label(rng))
        edges.append((root_id, svc_id))
        attach_points = [svc_id]

    chain_tails: list[str] = []
    while budget > 0:
        parent = rng.choice(attach_points)
        length = rng.randint(1, min(4, budget))
        step = 1
        for _ in range(length):
            nid = new_id()
            node = ADNode(id=nid, kind=NodeKind.ATTACK, label=_label(rng))
            _annotate_attack(rng, node, step)
            nodes[nid] = node
            edges.append((parent, nid))
            if rng.random() < 0.2:
                attach_points.append(parent)  # occasional sibling fan-out
            parent = nid
            step += 1
            budget -= 1
        chain_tails.append(parent)

    goal_id = new_id()
    nodes[goal_id] = ADNode(id=goal_id, kind=NodeKind.GOAL, label="Goal " + _label(rng))
    connected = 0
    for tail in chain_tails:
        if rng.random() < 0.75 or connected == 0 and tail is chain_tails[-1]:
            edges.append((tail, goal_id))
            connected += 1
    if connected == 0:
        edges.append((chain_tails[-1], goal_id))

    if rng.random() < 0.3:
        defense_id = new_id()
        nodes[defense_id] = ADNode(id=defense_id, kind=NodeKind.DEFENSE, label=_label(rng))
        host = rng.choice([nid for nid in nodes if nodes[nid].kind == NodeKind.ATTACK] or [root_id])
        edges.append((host, defense_id))

    style = None
    if rng.random() < 0.4:
        kinds = {}
        for kind in rng.sample([NodeKind.ATTACK, NodeKind.SERVICE, NodeKind.GOAL], rng.randint(1, 2)):
            attrs = {"fillcolor": rng.choice(FILLS)}
            if rng.random() < 0.5:
                attrs["fontname"] = rng.choice(FONT_NAMES)
            if rng.random() < 0.3:
                attrs["fontsize"] = str(rng.randint(8, 16))
            kinds[kind] = attrs
        style = StyleSheet(kinds)

    tree = ADTree(nodes=nodes, edges=edges, root=root_id, style=style)
    tree.validate()
    return tree


def random_reference(rng: random.Random, tree: ADTree) -> ReferenceOrder | None:
    """Sometimes absent, sometimes shuffled, sometimes branch-consistent."""
    attack_ids = sorted(nid for nid in tree.nodes if tree.nodes[nid].kind == NodeKind.ATTACK)
    roll = rng.random()
    if roll < 0.3:
        return None
    chosen = [nid for nid in attack_ids if rng.random() < 0.8]
    if not chosen:
        return None
    if roll < 0.65:
        rng.shuffle(chosen)
    return ReferenceOrder(chosen)
