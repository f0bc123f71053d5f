import json

import pytest
from click.testing import CliRunner

from adforge.cli import main

from conftest import FIXTURES


@pytest.fixture()
def runner():
    return CliRunner()


QWQ = str(FIXTURES / "trees" / "qwq.dot")
GPT4 = str(FIXTURES / "trees" / "gpt4.dot")
QWQ_REF = str(FIXTURES / "references" / "qwq-order.txt")
STATE = str(FIXTURES / "sce" / "paper-state.json")
DETECTOR = str(FIXTURES / "sce" / "detector.json")
DETECTOR_NONE = str(FIXTURES / "sce" / "detector-none.json")
DEFAULTS = str(FIXTURES / "sce" / "scenario-defaults.yaml")
SPEC = str(FIXTURES / "specs" / "govcloud.yaml")
SCRIPT = str(FIXTURES / "flow" / "qwq-script.json")
TRANSCRIPT = str(FIXTURES / "transcripts" / "qwq.json")


class TestScore:
    def test_qwq_fixture_scores(self, runner):
        result = runner.invoke(main, ["score", QWQ, "--reference", QWQ_REF])
        assert result.exit_code == 0
        assert "71.60" in result.output

    def test_json_output_matches_golden(self, runner):
        result = runner.invoke(main, ["score", QWQ, "--reference", QWQ_REF, "--json"])
        assert result.exit_code == 0
        golden = (FIXTURES / "golden" / "qwq-score.json").read_text("utf-8")
        assert result.output == golden

    def test_malformed_dot_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.dot"
        bad.write_text("digraph{a->}", "utf-8")
        result = runner.invoke(main, ["score", str(bad)])
        assert result.exit_code == 2
        assert "line" in result.output

    def test_no_attack_nodes_exits_3(self, runner, tmp_path):
        empty = tmp_path / "empty.dot"
        empty.write_text("digraph{r[adtkind=root];g[adtkind=goal];r->g}", "utf-8")
        result = runner.invoke(main, ["score", str(empty)])
        assert result.exit_code == 3

    def test_missing_file_exits_2(self, runner):
        result = runner.invoke(main, ["score", "does-not-exist.dot"])
        assert result.exit_code == 2


class TestExperiment:
    def base_args(self, tree=QWQ, state=STATE, detector=DETECTOR):
        return ["experiment", tree, "--goal", "goal", "--leaf-hint", "ec2_use",
                "--state", state, "--detector", detector, "--defaults", DEFAULTS]

    def test_confirmed_exits_0(self, runner):
        result = runner.invoke(main, self.base_args())
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["report"]["hypothesis_verdict"] == "confirmed"

    def test_vacuous_detector_exits_4(self, runner):
        result = runner.invoke(main, self.base_args(detector=DETECTOR_NONE))
        assert result.exit_code == 4

    def test_missing_permission_exits_5(self, runner, tmp_path):
        state = json.loads((FIXTURES / "sce" / "paper-state.json").read_text("utf-8"))
        state["principal_permissions"] = ["ec2:RequestSpotInstances"]
        crippled = tmp_path / "state.json"
        crippled.write_text(json.dumps(state), "utf-8")
        result = runner.invoke(main, self.base_args(state=str(crippled)))
        assert result.exit_code == 5

    def test_commandless_branch_exits_6(self, runner, tmp_path):
        text = (FIXTURES / "trees" / "qwq.dot").read_text("utf-8")
        lines = []
        for line in text.splitlines():
            if line.lstrip().startswith("ec2_"):
                line = line.replace(', cmd="', ', oldcmd="')
            lines.append(line)
        stripped = tmp_path / "stripped.dot"
        stripped.write_text("\n".join(lines) + "\n", "utf-8")
        result = runner.invoke(main, self.base_args(tree=str(stripped)))
        assert result.exit_code == 6
        assert "ec2_spot" in result.output

    def test_report_written_to_out(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(main, self.base_args() + ["--out", str(out)])
        assert result.exit_code == 0
        assert json.loads(out.read_text("utf-8"))["report"]["hypothesis_verdict"] == "confirmed"


class TestFlow:
    def test_scripted_run_reproduces_fixture(self, runner, tmp_path):
        out = tmp_path / "accepted.dot"
        result = runner.invoke(main, [
            "flow", SPEC,
            "--backend", f"mock:{TRANSCRIPT}",
            "--script", SCRIPT,
            "--state-dir", str(tmp_path / "sessions"),
            "--session-id", "scripted",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert out.read_bytes() == (FIXTURES / "trees" / "qwq.dot").read_bytes()

        score = runner.invoke(main, ["score", str(out), "--reference", QWQ_REF, "--json"])
        report = json.loads(score.output)["report"]
        assert abs(report["tree_score"] - 71.60) <= 0.01

    def test_missing_spec_exits_2(self, runner):
        result = runner.invoke(main, ["flow", "missing.yaml", "--backend", f"mock:{TRANSCRIPT}"])
        assert result.exit_code == 2

    def test_mock_backend_opens_no_sockets(self, runner, tmp_path, monkeypatch):
        import socket

        def explode(*args, **kwargs):
            raise AssertionError("network use attempted")

        monkeypatch.setattr(socket, "socket", explode)
        monkeypatch.setattr(socket, "create_connection", explode)
        result = runner.invoke(main, [
            "flow", SPEC,
            "--backend", f"mock:{TRANSCRIPT}",
            "--script", SCRIPT,
            "--state-dir", str(tmp_path / "sessions"),
        ], catch_exceptions=False)
        assert result.exit_code == 0, result.output

    def test_session_file_persisted(self, runner, tmp_path):
        state_dir = tmp_path / "sessions"
        runner.invoke(main, [
            "flow", SPEC,
            "--backend", f"mock:{TRANSCRIPT}",
            "--script", SCRIPT,
            "--state-dir", str(state_dir),
            "--session-id", "persisted",
        ])
        stored = json.loads((state_dir / "persisted.json").read_text("utf-8"))
        assert stored["phase"] == "done"
        assert stored["accepted_tree"] is not None
