"""Compile accepted tree branches into security chaos experiments.

A branch's attack nodes become ordered stages; the experiment wraps them
in an observability declaration, steady-state checks, and a falsifiable
hypothesis about what the detector should report.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from .errors import UnusableBranchError, ValidationError
from .model import ADTree, Branch, NodeKind


class StageAction(str, Enum):
    CHECK_FINDINGS = "check_findings"
    CREATE_SPOT_INSTANCE = "create_spot_instance"
    START_LISTENER = "start_listener"
    EXTRACT_CREDENTIALS = "extract_credentials"
    USE_CREDENTIALS = "use_credentials"
    CUSTOM = "custom"


REQUIRED_PARAMS: dict[StageAction, tuple[str, ...]] = {
    StageAction.CREATE_SPOT_INSTANCE: ("role_name", "user_data_base64"),
    StageAction.USE_CREDENTIALS: ("api_action",),
}

# Command keyword table for action inference; first match wins. Analysts can
# pin an action per node via ScenarioDefaults.action_overrides.
ACTION_PATTERNS: tuple[tuple[StageAction, str], ...] = (
    (StageAction.CREATE_SPOT_INSTANCE, r"request[-_]spot[-_]instances"),
    (StageAction.START_LISTENER, r"\blistener\b|reverse[ -]shell|\bnc\s+-l"),
    (StageAction.EXTRACT_CREDENTIALS, r"metadata-credentials|169\.254\.169\.254|security-credentials|instance[ -]metadata"),
    (StageAction.USE_CREDENTIALS, r"list-users|\bapi\b"),
)


def infer_action(commands: list[str]) -> StageAction:
    haystack = " ".join(commands).lower()
    for action, pattern in ACTION_PATTERNS:
        if re.search(pattern, haystack):
            return action
    return StageAction.CUSTOM


@dataclass
class Stage:
    name: str
    action: StageAction
    params: dict[str, str] = field(default_factory=dict)
    expected: str = ""

    def validate(self) -> None:
        missing = [p for p in REQUIRED_PARAMS.get(self.action, ()) if not self.params.get(p)]
        if missing:
            raise ValidationError(
                f"stage '{self.name}': action {self.action.value} needs params {', '.join(missing)}"
            )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "action": self.action.value,
            "params": dict(self.params),
            "expected": self.expected,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Stage":
        return cls(
            name=data["name"],
            action=StageAction(data["action"]),
            params={k: str(v) for k, v in (data.get("params") or {}).items()},
            expected=data.get("expected", ""),
        )


@dataclass
class Hypothesis:
    text: str
    expected_finding: str

    def to_dict(self) -> dict:
        return {"text": self.text, "expected_finding": self.expected_finding}

    @classmethod
    def from_dict(cls, data: dict) -> "Hypothesis":
        return cls(text=data.get("text", ""), expected_finding=data["expected_finding"])


@dataclass
class SCEExperiment:
    name: str
    observability: str
    steady_state: list[str]
    hypothesis: Hypothesis
    stages: list[Stage]
    source_branch: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if not self.stages:
            raise ValidationError("experiment needs at least one stage")
        if not self.steady_state:
            raise ValidationError("experiment needs at least one steady-state check")
        if not self.hypothesis.expected_finding:
            raise ValidationError("hypothesis needs an expected finding type")
        for stage in self.stages:
            stage.validate()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "observability": self.observability,
            "steady_state": list(self.steady_state),
            "hypothesis": self.hypothesis.to_dict(),
            "stages": [s.to_dict() for s in self.stages],
            "source_branch": list(self.source_branch),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SCEExperiment":
        exp = cls(
            name=data["name"],
            observability=data.get("observability", ""),
            steady_state=list(data.get("steady_state", [])),
            hypothesis=Hypothesis.from_dict(data["hypothesis"]),
            stages=[Stage.from_dict(s) for s in data.get("stages", [])],
            source_branch=list(data.get("source_branch", [])),
        )
        exp.validate()
        return exp

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def load(cls, path: str | Path) -> "SCEExperiment":
        return cls.from_dict(yaml.safe_load(Path(path).read_text("utf-8")))


@dataclass
class ScenarioDefaults:
    """Experiment boilerplate: the wrapper around compiled stages."""

    name: str = ""
    observability: str = "Detector findings are watched while injected actions run."
    steady_state: list[str] = field(default_factory=lambda: ["findings_empty"])
    hypothesis_text: str = "The detector reports the injected privileged action."
    expected_finding: str = "UnauthorizedAccess:EC2/SuspiciousUserData"
    initial_stages: list[Stage] = field(default_factory=list)
    action_overrides: dict[str, StageAction] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioDefaults":
        return cls(
            name=data.get("name", ""),
            observability=data.get("observability", cls.observability),
            steady_state=list(data.get("steady_state", ["findings_empty"])),
            hypothesis_text=data.get("hypothesis", {}).get("text", cls.hypothesis_text),
            expected_finding=data.get("hypothesis", {}).get(
                "expected_finding", cls.expected_finding
            ),
            initial_stages=[Stage.from_dict(s) for s in data.get("initial_stages", [])],
            action_overrides={
                nid: StageAction(a) for nid, a in (data.get("action_overrides") or {}).items()
            },
        )

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioDefaults":
        return cls.from_dict(yaml.safe_load(Path(path).read_text("utf-8")) or {})


def _parse_params(inputs: list[str]) -> dict[str, str]:
    params = {}
    for idx, raw in enumerate(inputs):
        if "=" in raw:
            key, _, value = raw.partition("=")
            params[key.strip()] = value.strip()
        else:
            params[f"param{idx}"] = raw.strip()
    return params


def compile_experiment(branch: Branch, tree: ADTree,
                       defaults: ScenarioDefaults | None = None) -> SCEExperiment:
    """Map each attack node of the branch to one stage, oldest first."""
    defaults = defaults or ScenarioDefaults()
    branch.validate(tree)

    attacks = [tree.nodes[nid] for nid in branch.node_ids
               if tree.nodes[nid].kind == NodeKind.ATTACK]
    if not attacks:
        raise UnusableBranchError([])
    commandless = [n.id for n in attacks if not n.commands]
    if commandless:
        raise UnusableBranchError(commandless)

    stages = list(defaults.initial_stages)
    for node in attacks:
        action = defaults.action_overrides.get(node.id, infer_action(node.commands))
        stages.append(Stage(
            name=node.label or node.id,
            action=action,
            params=_parse_params(node.inputs),
            expected=node.expected_results or "",
        ))

    goal_id = branch.node_ids[-1]
    experiment = SCEExperiment(
        name=defaults.name or f"sce-{goal_id}",
        observability=defaults.observability,
        steady_state=list(defaults.steady_state),
        hypothesis=Hypothesis(text=defaults.hypothesis_text,
                              expected_finding=defaults.expected_finding),
        stages=stages,
        source_branch=list(branch.node_ids),
    )
    experiment.validate()
    return experiment
