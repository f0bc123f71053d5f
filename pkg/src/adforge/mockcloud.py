"""Deterministic mock cloud account and experiment runner.

Simulates only the API surface the privilege-escalation scenario touches:
spot-instance requests with an attached role, metadata credential reads,
one credential-backed API call, and a rule-based detector that turns API
events into findings. user_data payloads stay opaque text and are only
pattern-matched, never executed.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path

from .errors import UnknownCheckError, ValidationError
from .sce import SCEExperiment, Stage, StageAction

SIM_EPOCH = datetime(2025, 1, 1, tzinfo=timezone.utc)

# Finding types the simulator can describe even with an empty rule set;
# configured detector rules extend this vocabulary.
BUILTIN_FINDING_TYPES = frozenset({
    "UnauthorizedAccess:EC2/SuspiciousUserData",
    "UnauthorizedAccess:IAMUser/InstanceCredentialExfiltration",
    "Persistence:IAMUser/AnomalousBehavior",
})

SPOT_REQUIRED_PERMISSIONS = ("ec2:RequestSpotInstances", "iam:PassRole")

STEADY_CHECKS = ("findings_empty", "no_overprivileged_roles", "detector_enabled")


@dataclass
class Credentials:
    key_id: str
    secret: str
    token: str
    expiry: str

    def to_dict(self) -> dict:
        return {"key_id": self.key_id, "secret": self.secret, "token": self.token, "expiry": self.expiry}


@dataclass
class Role:
    permissions: list[str] = field(default_factory=list)
    credentials: Credentials | None = None

    def allows(self, action: str) -> bool:
        return "*" in self.permissions or action in self.permissions


@dataclass
class Instance:
    id: str
    role_name: str
    user_data: str

    def to_dict(self) -> dict:
        return {"id": self.id, "role_name": self.role_name, "user_data": self.user_data}


@dataclass
class Finding:
    type: str
    severity: str
    timestamp: str

    def to_dict(self) -> dict:
        return {"type": self.type, "severity": self.severity, "timestamp": self.timestamp}


@dataclass
class MockCloudState:
    """Simulated account the experiment executor mutates (on its own copy)."""

    findings: list[Finding] = field(default_factory=list)
    instances: list[Instance] = field(default_factory=list)
    roles: dict[str, Role] = field(default_factory=dict)
    principal_permissions: list[str] = field(default_factory=list)

    def validate(self) -> None:
        ids = [inst.id for inst in self.instances]
        if len(ids) != len(set(ids)):
            raise ValidationError("instance ids must be unique")
        for inst in self.instances:
            if inst.role_name and inst.role_name not in self.roles:
                raise ValidationError(f"instance {inst.id} references unknown role '{inst.role_name}'")

    def to_dict(self) -> dict:
        return {
            "findings": [f.to_dict() for f in self.findings],
            "instances": [i.to_dict() for i in self.instances],
            "roles": {
                name: {
                    "permissions": list(role.permissions),
                    "credentials": role.credentials.to_dict() if role.credentials else None,
                }
                for name, role in sorted(self.roles.items())
            },
            "principal_permissions": list(self.principal_permissions),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MockCloudState":
        state = cls(
            findings=[Finding(**f) for f in data.get("findings", [])],
            instances=[Instance(**i) for i in data.get("instances", [])],
            roles={
                name: Role(
                    permissions=list(spec.get("permissions", [])),
                    credentials=Credentials(**spec["credentials"]) if spec.get("credentials") else None,
                )
                for name, spec in data.get("roles", {}).items()
            },
            principal_permissions=list(data.get("principal_permissions", [])),
        )
        state.validate()
        return state

    @classmethod
    def load(cls, path: str | Path) -> "MockCloudState":
        return cls.from_dict(json.loads(Path(path).read_text("utf-8")))

    def copy(self) -> "MockCloudState":
        return MockCloudState.from_dict(self.to_dict())


@dataclass
class DetectorRule:
    event: str
    finding_type: str
    severity: str = "HIGH"
    field: str | None = None
    pattern: str | None = None

    def matches(self, event_name: str, fields: dict[str, str]) -> bool:
        if event_name != self.event:
            return False
        if self.field is None or self.pattern is None:
            return True
        return re.search(self.pattern, fields.get(self.field, "")) is not None


@dataclass
class DetectorConfig:
    enabled: bool = True
    rules: list[DetectorRule] = field(default_factory=list)

    def known_finding_types(self) -> set[str]:
        return BUILTIN_FINDING_TYPES.union(rule.finding_type for rule in self.rules)

    @classmethod
    def from_dict(cls, data: dict) -> "DetectorConfig":
        return cls(
            enabled=data.get("enabled", True),
            rules=[
                DetectorRule(
                    event=r["event"],
                    finding_type=r["finding_type"],
                    severity=r.get("severity", "HIGH"),
                    field=r.get("field"),
                    pattern=r.get("pattern"),
                )
                for r in data.get("rules", [])
            ],
        )

    @classmethod
    def load(cls, path: str | Path) -> "DetectorConfig":
        return cls.from_dict(json.loads(Path(path).read_text("utf-8")))


def check_steady_state(state: MockCloudState, checks: list[str],
                       detector: DetectorConfig | None = None) -> dict[str, bool]:
    """Evaluate named preconditions; unknown names are an error."""
    results = {}
    for name in checks:
        if name == "findings_empty":
            results[name] = not state.findings
        elif name == "no_overprivileged_roles":
            results[name] = all("*" not in role.permissions for role in state.roles.values())
        elif name == "detector_enabled":
            results[name] = detector is not None and detector.enabled
        else:
            raise UnknownCheckError(f"steady-state check '{name}' is not declared")
    return results


class StageStatus(str, Enum):
    SUCCESS = "success"
    BLOCKED = "blocked"
    ERROR = "error"


class HypothesisVerdict(str, Enum):
    CONFIRMED = "confirmed"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass
class StageResult:
    name: str
    action: StageAction
    status: StageStatus
    observed: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "action": self.action.value,
            "status": self.status.value,
            "observed": self.observed,
        }


@dataclass
class ExperimentReport:
    experiment: str
    steady_state_before: dict[str, bool]
    stage_results: list[StageResult]
    detector_findings_emitted: list[Finding]
    hypothesis_verdict: HypothesisVerdict

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "steady_state_before": dict(self.steady_state_before),
            "stage_results": [r.to_dict() for r in self.stage_results],
            "detector_findings_emitted": [f.to_dict() for f in self.detector_findings_emitted],
            "hypothesis_verdict": self.hypothesis_verdict.value,
        }


class _Simulator:
    def __init__(self, state: MockCloudState, detector: DetectorConfig, seed: int):
        self.state = state
        self.detector = detector
        self.rng = random.Random(seed)
        self.clock = 0
        self.emitted: list[Finding] = []
        self.acquired_role: str | None = None

    def _timestamp(self) -> str:
        return (SIM_EPOCH + timedelta(seconds=self.clock)).strftime("%Y-%m-%dT%H:%M:%SZ")

    def _emit_event(self, name: str, fields: dict[str, str]) -> None:
        if not self.detector.enabled:
            return
        for rule in self.detector.rules:
            if rule.matches(name, fields):
                finding = Finding(type=rule.finding_type, severity=rule.severity,
                                  timestamp=self._timestamp())
                self.state.findings.append(finding)
                self.emitted.append(finding)

    def run_stage(self, stage: Stage) -> StageResult:
        self.clock += 1
        handler = {
            StageAction.CHECK_FINDINGS: self._check_findings,
            StageAction.CREATE_SPOT_INSTANCE: self._create_spot_instance,
            StageAction.START_LISTENER: self._start_listener,
            StageAction.EXTRACT_CREDENTIALS: self._extract_credentials,
            StageAction.USE_CREDENTIALS: self._use_credentials,
            StageAction.CUSTOM: self._custom,
        }[stage.action]
        status, observed = handler(stage)
        return StageResult(name=stage.name, action=stage.action, status=status, observed=observed)

    def _check_findings(self, stage: Stage) -> tuple[StageStatus, str]:
        if self.state.findings:
            return StageStatus.ERROR, f"{len(self.state.findings)} prior finding(s) present"
        return StageStatus.SUCCESS, "no prior findings"

    def _create_spot_instance(self, stage: Stage) -> tuple[StageStatus, str]:
        role_name = stage.params["role_name"]
        missing = [p for p in SPOT_REQUIRED_PERMISSIONS
                   if p not in self.state.principal_permissions]
        if missing:
            return StageStatus.BLOCKED, f"principal lacks {', '.join(missing)}"
        if role_name not in self.state.roles:
            return StageStatus.ERROR, f"role '{role_name}' does not exist"
        instance = Instance(
            id=f"i-{self.rng.getrandbits(64):016x}",
            role_name=role_name,
            user_data=stage.params.get("user_data_base64", ""),
        )
        self.state.instances.append(instance)
        self._emit_event("RequestSpotInstances", {
            "role_name": role_name,
            "user_data_base64": instance.user_data,
        })
        return StageStatus.SUCCESS, f"spot instance {instance.id} running with role {role_name}"

    def _start_listener(self, stage: Stage) -> tuple[StageStatus, str]:
        port = stage.params.get("listener_port", "4444")
        self._emit_event("StartListener", {"port": port})
        return StageStatus.SUCCESS, f"listener waiting on port {port}"

    def _extract_credentials(self, stage: Stage) -> tuple[StageStatus, str]:
        wanted = stage.params.get("role_name")
        candidates = [i for i in self.state.instances if wanted is None or i.role_name == wanted]
        if not candidates:
            return StageStatus.ERROR, "no instance to read metadata from"
        instance = candidates[-1]
        role = self.state.roles.get(instance.role_name)
        if role is None or role.credentials is None:
            return StageStatus.ERROR, f"role '{instance.role_name}' has no credentials issued"
        self.acquired_role = instance.role_name
        self._emit_event("GetRoleCredentials", {"role_name": instance.role_name})
        return (
            StageStatus.SUCCESS,
            f"temporary credentials for {instance.role_name} read from {instance.id} "
            f"(key {role.credentials.key_id})",
        )

    def _use_credentials(self, stage: Stage) -> tuple[StageStatus, str]:
        api_action = stage.params["api_action"]
        if self.acquired_role is None:
            return StageStatus.ERROR, "no credentials acquired yet"
        role = self.state.roles[self.acquired_role]
        if not role.allows(api_action):
            return StageStatus.BLOCKED, f"role {self.acquired_role} lacks {api_action}"
        self._emit_event(api_action, {"role_name": self.acquired_role})
        return StageStatus.SUCCESS, f"{api_action} succeeded with credentials of {self.acquired_role}"

    def _custom(self, stage: Stage) -> tuple[StageStatus, str]:
        return StageStatus.SUCCESS, "custom stage acknowledged (not simulated)"


def run_experiment(exp: SCEExperiment, initial: MockCloudState,
                   detector: DetectorConfig, seed: int = 0) -> ExperimentReport:
    """Execute stages in order on a copy of the state; stop at the first
    non-success; derive the verdict from stage outcomes and findings."""
    exp.validate()
    initial.validate()
    if exp.hypothesis.expected_finding not in detector.known_finding_types():
        raise ValidationError(
            f"hypothesis finding '{exp.hypothesis.expected_finding}' is unknown to the simulator"
        )

    state = initial.copy()
    sim = _Simulator(state, detector, seed)
    steady = check_steady_state(state, exp.steady_state, detector)

    results: list[StageResult] = []
    for stage in exp.stages:
        result = sim.run_stage(stage)
        results.append(result)
        if result.status is not StageStatus.SUCCESS:
            break

    confirmed = any(f.type == exp.hypothesis.expected_finding for f in sim.emitted)
    all_success = len(results) == len(exp.stages) and all(
        r.status is StageStatus.SUCCESS for r in results
    )
    if confirmed:
        verdict = HypothesisVerdict.CONFIRMED
    elif all_success:
        verdict = HypothesisVerdict.REFUTED
    else:
        verdict = HypothesisVerdict.INCONCLUSIVE

    return ExperimentReport(
        experiment=exp.name,
        steady_state_before=steady,
        stage_results=results,
        detector_findings_emitted=list(sim.emitted),
        hypothesis_verdict=verdict,
    )
