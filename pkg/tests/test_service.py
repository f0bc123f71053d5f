import json

import pytest
from fastapi.testclient import TestClient

from adforge.config import AppConfig
from adforge.service import create_app

from conftest import FIXTURES

TRANSCRIPT = str(FIXTURES / "transcripts" / "qwq.json")
QWQ_DOT = (FIXTURES / "trees" / "qwq.dot").read_text("utf-8")
QWQ_REFERENCE = [
    line for line in (FIXTURES / "references" / "qwq-order.txt").read_text("utf-8").splitlines() if line
]
SPEC = json.loads(json.dumps({
    "system_context": "Cloud-native military logistics platform tracking warfighter supplies "
                      "across global bases; classified inventory data must withstand "
                      "nation-state espionage attempts.",
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
}))

STYLE = {
    "attack": {"fillcolor": "#ADD8E6"},
    "service": {"fillcolor": "#00008B"},
    "defense": {"fillcolor": "#90EE90"},
    "goal": {"fillcolor": "#FFD700"},
}


@pytest.fixture()
def state_dir(tmp_path):
    return tmp_path / "sessions"


@pytest.fixture()
def client(state_dir):
    config = AppConfig(state_dir=str(state_dir), backend=f"mock:{TRANSCRIPT}")
    return TestClient(create_app(config))


def start(client) -> str:
    resp = client.post("/sessions", json={"spec": SPEC})
    assert resp.status_code == 201, resp.text
    body = resp.json()
    assert body["schema_version"] == "1"
    assert body["session"]["phase"] == "prompt_context"
    return body["session"]["id"]


class TestSessions:
    def test_full_loop_reproduces_fixture(self, client):
        sid = start(client)
        assert client.post(f"/sessions/{sid}/insert").status_code == 200
        for component in ("AWS EC2", "AWS CodeBuild", "AWS CodeGuru"):
            resp = client.post(f"/sessions/{sid}/branch",
                               json={"mode": "generalized", "component": component})
            assert resp.status_code == 200, resp.text
        assert client.post(f"/sessions/{sid}/merge", json={}).status_code == 200
        assert client.post(f"/sessions/{sid}/cosmetics", json={"style": STYLE}).status_code == 200
        resp = client.post(f"/sessions/{sid}/validate", json={"verdict": "accept"})
        assert resp.json()["session"]["phase"] == "done"

        dot = client.get(f"/sessions/{sid}/tree.dot")
        assert dot.status_code == 200
        assert dot.headers["content-type"].startswith("text/vnd.graphviz")
        assert dot.text == QWQ_DOT

    def test_unknown_session_404(self, client):
        resp = client.get("/sessions/nope")
        assert resp.status_code == 404
        assert resp.json()["code"] == "not_found"

    def test_refine_without_feedback_400(self, client):
        sid = start(client)
        client.post(f"/sessions/{sid}/insert")
        client.post(f"/sessions/{sid}/branch", json={"mode": "generalized", "component": "AWS EC2"})
        resp = client.post(f"/sessions/{sid}/validate", json={"verdict": "refine"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "validation_error"

    def test_illegal_transition_409_state_untouched(self, client, state_dir):
        sid = start(client)
        before = client.get(f"/sessions/{sid}").json()
        resp = client.post(f"/sessions/{sid}/merge", json={})  # merge needs attack context
        assert resp.status_code == 409
        assert resp.json()["code"] in ("illegal_phase", "precondition_error")
        after = client.get(f"/sessions/{sid}").json()
        assert before == after

    def test_restart_reloads_identically(self, state_dir):
        config = AppConfig(state_dir=str(state_dir), backend=f"mock:{TRANSCRIPT}")
        first = TestClient(create_app(config))
        sid = start(first)
        first.post(f"/sessions/{sid}/insert")
        snapshot = first.get(f"/sessions/{sid}").text

        second = TestClient(create_app(AppConfig(state_dir=str(state_dir),
                                                 backend=f"mock:{TRANSCRIPT}")))
        assert second.get(f"/sessions/{sid}").text == snapshot

    def test_unrecorded_prompt_becomes_502(self, client):
        sid = start(client)
        client.post(f"/sessions/{sid}/insert")
        resp = client.post(f"/sessions/{sid}/branch",
                           json={"mode": "generalized", "component": "AWS Lambda"})
        assert resp.status_code == 502
        assert resp.json()["code"] == "backend_error"

    def test_list_sessions(self, client):
        sid = start(client)
        assert sid in client.get("/sessions").json()["sessions"]


class TestScoreEndpoint:
    def test_fixture_scores(self, client):
        resp = client.post("/score", json={"dot": QWQ_DOT, "reference": QWQ_REFERENCE})
        assert resp.status_code == 200
        body = resp.json()
        assert body["schema_version"] == "1"
        assert body["report"]["tree_score"] == 71.60

    def test_matches_cli_golden(self, client):
        resp = client.post("/score", json={"dot": QWQ_DOT, "reference": QWQ_REFERENCE})
        golden = json.loads((FIXTURES / "golden" / "qwq-score.json").read_text("utf-8"))
        assert resp.json() == golden

    def test_bad_dot_400(self, client):
        resp = client.post("/score", json={"dot": "digraph{a->}"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "parse_error"

    def test_empty_tree_400(self, client):
        resp = client.post("/score", json={"dot": "digraph{r[adtkind=root];g[adtkind=goal];r->g}"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "empty_tree"


class TestExperimentEndpoints:
    def test_compile_and_run_confirmed(self, client):
        defaults = json.loads(json.dumps({
            "name": "spot-role-privilege-escalation",
            "steady_state": ["findings_empty", "detector_enabled"],
            "hypothesis": {
                "text": "detector catches the launch",
                "expected_finding": "UnauthorizedAccess:EC2/SuspiciousUserData",
            },
            "initial_stages": [
                {"name": "baseline", "action": "check_findings", "params": {}, "expected": ""}
            ],
        }))
        resp = client.post("/experiments/compile", json={
            "tree_dot": QWQ_DOT, "goal_id": "goal", "leaf_hint": "ec2_use",
            "defaults": defaults,
        })
        assert resp.status_code == 200, resp.text
        experiment = resp.json()["experiment"]
        assert [s["action"] for s in experiment["stages"]] == [
            "check_findings", "create_spot_instance", "extract_credentials", "use_credentials",
        ]

        run = client.post("/experiments/run", json={
            "experiment": experiment,
            "initial_state": json.loads((FIXTURES / "sce" / "paper-state.json").read_text("utf-8")),
            "detector": json.loads((FIXTURES / "sce" / "detector.json").read_text("utf-8")),
        })
        assert run.status_code == 200, run.text
        assert run.json()["report"]["hypothesis_verdict"] == "confirmed"

    def test_compile_commandless_branch_400(self, client):
        dot = QWQ_DOT.replace(', cmd="aws ec2 request-spot-instances', ', oldcmd="aws ec2 request-spot-instances')
        resp = client.post("/experiments/compile", json={"tree_dot": dot, "goal_id": "goal",
                                                         "leaf_hint": "ec2_use"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "unusable_branch"
        assert resp.json()["detail"]["node_ids"] == ["ec2_spot"]

    def test_unknown_goal_404(self, client):
        resp = client.post("/experiments/compile", json={"tree_dot": QWQ_DOT, "goal_id": "zzz"})
        assert resp.status_code == 404


class TestExperimentParity:
    def test_cli_and_http_reports_match(self, client, tmp_path):
        from click.testing import CliRunner
        from adforge.cli import main

        out = tmp_path / "report.json"
        cli = CliRunner().invoke(main, [
            "experiment", str(FIXTURES / "trees" / "qwq.dot"),
            "--goal", "goal", "--leaf-hint", "ec2_use",
            "--state", str(FIXTURES / "sce" / "paper-state.json"),
            "--detector", str(FIXTURES / "sce" / "detector.json"),
            "--defaults", str(FIXTURES / "sce" / "scenario-defaults.yaml"),
            "--out", str(out),
        ])
        assert cli.exit_code == 0

        import yaml
        defaults = yaml.safe_load((FIXTURES / "sce" / "scenario-defaults.yaml").read_text("utf-8"))
        compiled = client.post("/experiments/compile", json={
            "tree_dot": QWQ_DOT, "goal_id": "goal", "leaf_hint": "ec2_use",
            "defaults": defaults,
        }).json()["experiment"]
        http_body = client.post("/experiments/run", json={
            "experiment": compiled,
            "initial_state": json.loads((FIXTURES / "sce" / "paper-state.json").read_text("utf-8")),
            "detector": json.loads((FIXTURES / "sce" / "detector.json").read_text("utf-8")),
            "seed": 0,
        }).json()
        assert json.loads(out.read_text("utf-8")) == http_body


class TestMisc:
    def test_healthz(self, client):
        body = client.get("/healthz").json()
        assert body == {"schema_version": "1", "status": "ok"}

    def test_malformed_body_400(self, client):
        resp = client.post("/score", content=b"not json",
                           headers={"content-type": "application/json"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "validation_error"
