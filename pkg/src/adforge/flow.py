"""Six-phase session flow for LLM-driven tree generation.

A session moves through grounding, structured prompting, branch
generation, cosmetic adjustment, and expert validation. All transitions
are checked up front: an operation invoked in the wrong phase raises and
leaves the session untouched.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from .backends import Backend
from .dot import emit_dot, parse_dot
from .errors import (
    EmptyTreeError,
    IllegalPhaseError,
    NoDotFoundError,
    PreconditionError,
    ValidationError,
)
from .metrics import MetricReport, TechniqueCatalog, tree_score
from .model import ADTree, StyleSheet, merge_trees


class Phase(str, Enum):
    APP_SEC_CONTEXT = "app_sec_context"
    PROMPT_CONTEXT = "prompt_context"
    INSERT_PROMPT = "insert_prompt"
    ATTACK_CONTEXT = "attack_context"
    COSMETIC_CONTEXT = "cosmetic_context"
    EXPERT_VALIDATION = "expert_validation"
    DONE = "done"


class BranchMode(str, Enum):
    GENERALIZED = "generalized"
    SPECIFIC = "specific"


class Verdict(str, Enum):
    ACCEPT = "accept"
    REFINE = "refine"


GROUNDING_QUESTIONS = (
    "What is application security?",
    "What is threat modeling?",
    "What is threat modeling using attack trees?",
)

# Whitespace tokens kept from each grounding answer when carried forward.
DEFAULT_SUMMARY_BUDGET = 160

ANNOTATION_GUIDE = (
    "Reply with a single DOT digraph in a fenced code block. Mark every node "
    "with adtkind (root, service, attack, defense, or goal) and a label. On "
    "attack nodes add mitre (technique id), cmd (commands, ';;'-separated), "
    "inputs (name=value pairs, ';;'-separated), expect (expected result), and "
    "step (position within its branch)."
)


@dataclass
class Component:
    technology: str
    safeguards: list[str] = field(default_factory=list)


@dataclass
class PromptSpec:
    """The structured 4-parameter prompt that seeds tree generation."""

    system_context: str
    components: list[Component]
    attack_goals: list[str]
    tree_root: str

    def validate(self) -> None:
        if not self.system_context.strip():
            raise ValidationError("prompt spec: system_context must be non-empty")
        if not self.components:
            raise ValidationError("prompt spec: at least one component is required")
        if any(not c.technology.strip() for c in self.components):
            raise ValidationError("prompt spec: every component needs a technology name")
        if not self.attack_goals or any(not g.strip() for g in self.attack_goals):
            raise ValidationError("prompt spec: at least one non-empty attack goal is required")
        if not self.tree_root.strip():
            raise ValidationError("prompt spec: tree_root must be non-empty")

    def to_dict(self) -> dict:
        return {
            "system_context": self.system_context,
            "components": [
                {"technology": c.technology, "safeguards": list(c.safeguards)}
                for c in self.components
            ],
            "attack_goals": list(self.attack_goals),
            "tree_root": self.tree_root,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PromptSpec":
        spec = cls(
            system_context=data.get("system_context", ""),
            components=[
                Component(technology=c.get("technology", ""), safeguards=list(c.get("safeguards", [])))
                for c in data.get("components", [])
            ],
            attack_goals=list(data.get("attack_goals", [])),
            tree_root=data.get("tree_root", ""),
        )
        spec.validate()
        return spec

    @classmethod
    def load(cls, path: str | Path) -> "PromptSpec":
        return cls.from_dict(yaml.safe_load(Path(path).read_text("utf-8")))


@dataclass
class Candidate:
    tree: ADTree
    origin_phase: Phase
    metric_report: MetricReport | None = None

    def to_dict(self) -> dict:
        return {
            "tree": self.tree.to_dict(),
            "origin_phase": self.origin_phase.value,
            "metric_report": self.metric_report.to_dict() if self.metric_report else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Candidate":
        return cls(
            tree=ADTree.from_dict(data["tree"]),
            origin_phase=Phase(data["origin_phase"]),
            metric_report=MetricReport.from_dict(data["metric_report"]) if data.get("metric_report") else None,
        )


@dataclass
class FlowSession:
    id: str
    phase: Phase
    spec: PromptSpec
    transcript: list[dict] = field(default_factory=list)
    candidates: list[Candidate] = field(default_factory=list)
    accepted_tree: ADTree | None = None
    iteration_count: int = 0

    @property
    def latest_candidate(self) -> Candidate:
        if not self.candidates:
            raise PreconditionError("session has no tree candidates yet")
        return self.candidates[-1]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "phase": self.phase.value,
            "spec": self.spec.to_dict(),
            "transcript": [dict(t) for t in self.transcript],
            "candidates": [c.to_dict() for c in self.candidates],
            "accepted_tree": self.accepted_tree.to_dict() if self.accepted_tree else None,
            "iteration_count": self.iteration_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FlowSession":
        return cls(
            id=data["id"],
            phase=Phase(data["phase"]),
            spec=PromptSpec.from_dict(data["spec"]),
            transcript=[dict(t) for t in data.get("transcript", [])],
            candidates=[Candidate.from_dict(c) for c in data.get("candidates", [])],
            accepted_tree=ADTree.from_dict(data["accepted_tree"]) if data.get("accepted_tree") else None,
            iteration_count=data.get("iteration_count", 0),
        )


# --------------------------------------------------------------------------
# prompt rendering

def render_insert_prompt(spec: PromptSpec) -> str:
    """Deterministic phase-3 prompt: the four parameters in fixed order."""
    spec.validate()
    lines = ["You are helping a security analyst model threats against one system.", ""]
    lines.append(f"System Context: {spec.system_context}")
    lines.append("")
    lines.append("Component List:")
    for comp in spec.components:
        if comp.safeguards:
            lines.append(f"- {comp.technology} (safeguards: {'; '.join(comp.safeguards)})")
        else:
            lines.append(f"- {comp.technology}")
    lines.append("")
    lines.append("Attack Goals:")
    for goal in spec.attack_goals:
        lines.append(f"- {goal}")
    lines.append("")
    lines.append(f"Tree Root: {spec.tree_root}")
    lines.append("")
    lines.append(
        "Study this system. You will be asked for attack-defense branches next. "
        + ANNOTATION_GUIDE
    )
    return "\n".join(lines)


def _branch_prompt(spec: PromptSpec, mode: BranchMode, component: str | None,
                   resource_doc: str | None) -> str:
    goal = spec.attack_goals[0]
    if mode is BranchMode.GENERALIZED:
        scope = f"the component {component}" if component else "the system as a whole"
        return (
            f"Generate one generalized attack-defense branch for {scope}. Infer "
            "plausible attacks from the system context, the topological components "
            "and their safeguards, and the attack goals. Start the branch at the "
            f"tree root '{spec.tree_root}', pass through the targeted service node, "
            f"and end in a goal node labeled '{goal}'. " + ANNOTATION_GUIDE
        )
    header = f"for the component {component}" if component else "for the system"
    return (
        f"Generate one specific attack-defense branch {header}, following the "
        "attack procedure documented below. Start the branch at the tree root "
        f"'{spec.tree_root}' and end in a goal node labeled '{goal}'. "
        + ANNOTATION_GUIDE
        + "\n\n--- attack procedure ---\n"
        + (resource_doc or "")
    )


def _refine_prompt(dot_source: str, feedback: str) -> str:
    return (
        "The security analyst reviewed the attack-defense tree below and asks for "
        f"revisions.\n\nFeedback: {feedback}\n\n```dot\n{dot_source}```\n\n"
        "Apply the feedback. " + ANNOTATION_GUIDE
    )


def _restructure_prompt(dot_source: str, instruction: str) -> str:
    return (
        "Redefine the structure of the attack-defense tree below without changing "
        f"its meaning. Instruction: {instruction}\n\n```dot\n{dot_source}```\n\n"
        + ANNOTATION_GUIDE
    )


_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def extract_dot_blocks(reply: str) -> list[str]:
    """Fenced code blocks that begin with `digraph`, in order of appearance."""
    blocks = []
    for match in _FENCE_RE.finditer(reply):
        body = match.group(1)
        if body.lstrip().startswith("digraph"):
            blocks.append(body.strip())
    if not blocks and reply.strip().startswith("digraph"):
        blocks.append(reply.strip())
    return blocks


def summarize(text: str, budget: int = DEFAULT_SUMMARY_BUDGET) -> str:
    """Truncate to a whitespace-token budget; model memory is finite."""
    tokens = text.split()
    if len(tokens) <= budget:
        return text
    return " ".join(tokens[:budget])


# --------------------------------------------------------------------------
# session operations

def _require_phase(session: FlowSession, op: str, allowed: tuple[Phase, ...]) -> None:
    if session.phase not in allowed:
        raise IllegalPhaseError(session.phase, op)


def _ask(session: FlowSession, backend: Backend, prompt: str) -> str:
    # the outgoing turn is committed only once a reply arrived, so a failed
    # request leaves the append-only transcript untouched
    reply = backend.complete(session.transcript + [{"role": "user", "text": prompt}])
    session.transcript.append({"role": "user", "text": prompt})
    session.transcript.append({"role": "assistant", "text": reply})
    return reply


def _store_candidate(session: FlowSession, tree: ADTree, origin: Phase,
                     catalog: TechniqueCatalog | None) -> Candidate:
    try:
        report = tree_score(tree, catalog or _default_catalog())
    except EmptyTreeError:
        report = None  # trees without attack nodes are storable, just unscored
    candidate = Candidate(tree=tree, origin_phase=origin, metric_report=report)
    session.candidates.append(candidate)
    return candidate


_CATALOG_CACHE: TechniqueCatalog | None = None


def _default_catalog() -> TechniqueCatalog:
    global _CATALOG_CACHE
    if _CATALOG_CACHE is None:
        _CATALOG_CACHE = TechniqueCatalog.load()
    return _CATALOG_CACHE


def _parse_reply_tree(reply: str) -> ADTree:
    blocks = extract_dot_blocks(reply)
    if not blocks:
        raise NoDotFoundError("reply contains no DOT code block")
    try:
        return parse_dot(blocks[0])
    except Exception as exc:
        exc.dot_source = blocks[0]  # keep the raw block for analyst inspection
        raise


def start_session(spec: PromptSpec, backend: Backend, session_id: str | None = None,
                  summary_budget: int = DEFAULT_SUMMARY_BUDGET) -> FlowSession:
    """Create a session and run the three grounding questions.

    On backend failure the partially-grounded session is attached to the
    raised error (`exc.session`) so the caller can persist and resume it.
    """
    spec.validate()
    session = FlowSession(id=session_id or uuid.uuid4().hex, phase=Phase.APP_SEC_CONTEXT, spec=spec)
    try:
        resume_grounding(session, backend, summary_budget)
    except Exception as exc:
        exc.session = session
        raise
    return session


def resume_grounding(session: FlowSession, backend: Backend,
                     summary_budget: int = DEFAULT_SUMMARY_BUDGET) -> FlowSession:
    """Finish any grounding questions not yet answered, then advance."""
    _require_phase(session, "grounding", (Phase.APP_SEC_CONTEXT,))
    answered = sum(
        1 for t in session.transcript if t["role"] == "user" and t["text"] in GROUNDING_QUESTIONS
    )
    for question in GROUNDING_QUESTIONS[answered:]:
        reply = backend.complete(session.transcript + [{"role": "user", "text": question}])
        session.transcript.append({"role": "user", "text": question})
        session.transcript.append({"role": "assistant", "text": summarize(reply, summary_budget)})
    session.phase = Phase.PROMPT_CONTEXT
    return session


def send_insert_prompt(session: FlowSession, backend: Backend,
                       catalog: TechniqueCatalog | None = None) -> FlowSession:
    """Phase 3: deliver the structured system summary to the model."""
    _require_phase(session, "send_insert_prompt", (Phase.PROMPT_CONTEXT,))
    reply = _ask(session, backend, render_insert_prompt(session.spec))
    session.phase = Phase.INSERT_PROMPT
    for block in extract_dot_blocks(reply):
        try:
            tree = parse_dot(block)
        except Exception:
            continue  # the insert reply is not contractually a tree
        _store_candidate(session, tree, Phase.INSERT_PROMPT, catalog)
        break
    return session


def request_branch(session: FlowSession, backend: Backend, mode: BranchMode,
                   component: str | None = None, resource_doc: str | None = None,
                   catalog: TechniqueCatalog | None = None) -> Candidate:
    """Phase 4: ask for a generalized or specific attack-defense branch."""
    _require_phase(session, "request_branch", (Phase.INSERT_PROMPT, Phase.ATTACK_CONTEXT))
    if mode is BranchMode.SPECIFIC and not (resource_doc and resource_doc.strip()):
        raise ValidationError("specific branches need a resource document with the detailed attack")
    reply = _ask(session, backend, _branch_prompt(session.spec, mode, component, resource_doc))
    tree = _parse_reply_tree(reply)
    candidate = _store_candidate(session, tree, Phase.ATTACK_CONTEXT, catalog)
    session.iteration_count += 1
    session.phase = Phase.ATTACK_CONTEXT
    return candidate


def merge_candidates(session: FlowSession, root_label: str | None = None,
                     catalog: TechniqueCatalog | None = None) -> Candidate:
    """Combine all candidates into one converging tree (no LLM round-trip)."""
    _require_phase(session, "merge_candidates", (Phase.ATTACK_CONTEXT,))
    if not session.candidates:
        raise PreconditionError("nothing to merge: session has no candidates")
    merged = merge_trees([c.tree for c in session.candidates], root_label or session.spec.tree_root)
    return _store_candidate(session, merged, Phase.ATTACK_CONTEXT, catalog)


def apply_cosmetics(session: FlowSession, backend: Backend | None = None,
                    style: StyleSheet | None = None, restructure: str | None = None,
                    catalog: TechniqueCatalog | None = None) -> Candidate:
    """Phase 5: apply a stylesheet locally and/or ask for a restructure."""
    if not session.candidates:
        raise PreconditionError("cosmetics need an existing candidate")
    _require_phase(session, "apply_cosmetics", (Phase.ATTACK_CONTEXT, Phase.COSMETIC_CONTEXT))
    if style is None and restructure is None:
        raise ValidationError("provide a stylesheet, a restructure instruction, or both")
    if restructure is not None and backend is None:
        raise ValidationError("restructuring goes through the model; a backend is required")

    working = session.latest_candidate.tree
    if style is not None:
        style.validate()
        working = ADTree.from_dict(working.to_dict())
        working.style = style
    if restructure is not None:
        reply = _ask(session, backend, _restructure_prompt(emit_dot(working), restructure))
        working = _parse_reply_tree(reply)
    candidate = _store_candidate(session, working, Phase.COSMETIC_CONTEXT, catalog)
    session.phase = Phase.COSMETIC_CONTEXT
    return candidate


def begin_validation(session: FlowSession) -> FlowSession:
    """Hand the latest candidate to the expert for review."""
    if not session.candidates:
        raise PreconditionError("validation needs an existing candidate")
    _require_phase(session, "begin_validation", (Phase.ATTACK_CONTEXT, Phase.COSMETIC_CONTEXT))
    session.phase = Phase.EXPERT_VALIDATION
    return session


def submit_validation(session: FlowSession, verdict: Verdict, feedback: str | None = None,
                      backend: Backend | None = None,
                      catalog: TechniqueCatalog | None = None) -> FlowSession:
    """Phase 6: accept the latest candidate or send it back with feedback."""
    if not session.candidates:
        raise PreconditionError("validation needs an existing candidate")
    _require_phase(
        session, "submit_validation",
        (Phase.ATTACK_CONTEXT, Phase.COSMETIC_CONTEXT, Phase.EXPERT_VALIDATION),
    )
    if verdict is Verdict.ACCEPT:
        session.accepted_tree = session.latest_candidate.tree
        session.phase = Phase.DONE
        return session
    if not (feedback and feedback.strip()):
        raise ValidationError("a refine verdict needs feedback text")
    if backend is None:
        raise ValidationError("refinement goes through the model; a backend is required")
    dot_source = emit_dot(session.latest_candidate.tree)
    reply = _ask(session, backend, _refine_prompt(dot_source, feedback))
    tree = _parse_reply_tree(reply)
    _store_candidate(session, tree, Phase.ATTACK_CONTEXT, catalog)
    session.iteration_count += 1
    session.phase = Phase.ATTACK_CONTEXT
    return session
