import copy
import json

import pytest

from adforge.errors import UnknownCheckError, UnusableBranchError, ValidationError
from adforge.mockcloud import (
    DetectorConfig,
    HypothesisVerdict,
    MockCloudState,
    StageStatus,
    check_steady_state,
    run_experiment,
)
from adforge.model import extract_branch
from adforge.sce import (
    SCEExperiment,
    ScenarioDefaults,
    Stage,
    StageAction,
    compile_experiment,
    infer_action,
)


@pytest.fixture()
def paper_state(fixtures_dir) -> MockCloudState:
    return MockCloudState.load(fixtures_dir / "sce" / "paper-state.json")


@pytest.fixture()
def detector(fixtures_dir) -> DetectorConfig:
    return DetectorConfig.load(fixtures_dir / "sce" / "detector.json")


@pytest.fixture()
def vacuous_detector(fixtures_dir) -> DetectorConfig:
    return DetectorConfig.load(fixtures_dir / "sce" / "detector-none.json")


@pytest.fixture()
def defaults(fixtures_dir) -> ScenarioDefaults:
    return ScenarioDefaults.load(fixtures_dir / "sce" / "scenario-defaults.yaml")


@pytest.fixture()
def ec2_experiment(qwq_tree, defaults) -> SCEExperiment:
    branch = extract_branch(qwq_tree, "goal", leaf_hint="ec2_use")
    return compile_experiment(branch, qwq_tree, defaults)


class TestActionInference:
    @pytest.mark.parametrize("commands, action", [
        (["aws ec2 request-spot-instances --spec x"], StageAction.CREATE_SPOT_INSTANCE),
        (["nc -lvnp 4444"], StageAction.START_LISTENER),
        (["set up a reverse shell"], StageAction.START_LISTENER),
        (["curl http://169.254.169.254/latest/meta-data/"], StageAction.EXTRACT_CREDENTIALS),
        (["aws iam list-users"], StageAction.USE_CREDENTIALS),
        (["call the api with stolen keys"], StageAction.USE_CREDENTIALS),
        (["rm -rf /tmp/workdir"], StageAction.CUSTOM),
    ])
    def test_keyword_table(self, commands, action):
        assert infer_action(commands) is action

    def test_override_pins_action(self, qwq_tree):
        branch = extract_branch(qwq_tree, "goal", leaf_hint="ec2_use")
        defaults = ScenarioDefaults(action_overrides={"ec2_creds": StageAction.CUSTOM})
        exp = compile_experiment(branch, qwq_tree, defaults)
        by_name = {s.name: s.action for s in exp.stages}
        assert by_name["Harvest role credentials from instance metadata"] is StageAction.CUSTOM


class TestCompile:
    def test_fixture_branch_compiles_paper_stages(self, ec2_experiment):
        actions = [s.action for s in ec2_experiment.stages]
        assert actions == [
            StageAction.CHECK_FINDINGS,
            StageAction.CREATE_SPOT_INSTANCE,
            StageAction.EXTRACT_CREDENTIALS,
            StageAction.USE_CREDENTIALS,
        ]
        spot = ec2_experiment.stages[1]
        assert spot.params["role_name"] == "EC2-CloudWatch-Agent-Role"
        assert spot.params["user_data_base64"]

    def test_commandless_branch_rejected(self, qwq_tree, defaults):
        tree = copy.deepcopy(qwq_tree)
        tree.nodes["ec2_spot"].commands = []
        tree.nodes["ec2_creds"].commands = []
        branch = extract_branch(tree, "goal", leaf_hint="ec2_use")
        with pytest.raises(UnusableBranchError) as err:
            compile_experiment(branch, tree, defaults)
        assert err.value.node_ids == ["ec2_spot", "ec2_creds"]

    def test_single_node_branch_is_one_stage(self):
        from adforge.dot import parse_dot
        tree = parse_dot(
            'digraph{r[adtkind=root]; a[adtkind=attack,label=only,cmd="run probe",'
            'inputs="k=v"]; g[adtkind=goal]; r->a; a->g}'
        )
        branch = extract_branch(tree, "g")
        exp = compile_experiment(branch, tree)  # built-in defaults: no initial stages
        assert len(exp.stages) == 1
        assert exp.stages[0].action is StageAction.CUSTOM

    def test_yaml_round_trip(self, ec2_experiment, tmp_path):
        path = tmp_path / "exp.yaml"
        path.write_text(ec2_experiment.to_yaml(), "utf-8")
        again = SCEExperiment.load(path)
        assert again.to_dict() == ec2_experiment.to_dict()

    def test_missing_required_params_rejected(self):
        stage = Stage(name="bad", action=StageAction.CREATE_SPOT_INSTANCE, params={})
        with pytest.raises(ValidationError):
            stage.validate()


class TestSteadyState:
    def test_findings_empty(self, paper_state, detector):
        assert check_steady_state(paper_state, ["findings_empty"], detector) == {"findings_empty": True}

    def test_overprivileged_role_fails(self, paper_state, detector):
        paper_state.roles["EC2-CloudWatch-Agent-Role"].permissions.append("*")
        result = check_steady_state(paper_state, ["no_overprivileged_roles"], detector)
        assert result["no_overprivileged_roles"] is False

    def test_unknown_check(self, paper_state):
        with pytest.raises(UnknownCheckError):
            check_steady_state(paper_state, ["bogus"])


class TestRunExperiment:
    def test_paper_scenario_confirms(self, ec2_experiment, paper_state, detector):
        report = run_experiment(ec2_experiment, paper_state, detector)
        assert all(r.status is StageStatus.SUCCESS for r in report.stage_results)
        assert len(report.stage_results) == 4
        assert [f.type for f in report.detector_findings_emitted] == [
            "UnauthorizedAccess:EC2/SuspiciousUserData"
        ]
        assert report.hypothesis_verdict is HypothesisVerdict.CONFIRMED
        assert all(report.steady_state_before.values())

    def test_missing_passrole_blocks(self, ec2_experiment, paper_state, detector):
        paper_state.principal_permissions.remove("iam:PassRole")
        report = run_experiment(ec2_experiment, paper_state, detector)
        blocked = report.stage_results[-1]
        assert blocked.action is StageAction.CREATE_SPOT_INSTANCE
        assert blocked.status is StageStatus.BLOCKED
        assert "iam:PassRole" in blocked.observed
        assert report.hypothesis_verdict is HypothesisVerdict.INCONCLUSIVE

    def test_vacuous_detector_refutes(self, ec2_experiment, paper_state, vacuous_detector):
        report = run_experiment(ec2_experiment, paper_state, vacuous_detector)
        assert all(r.status is StageStatus.SUCCESS for r in report.stage_results)
        assert report.detector_findings_emitted == []
        assert report.hypothesis_verdict is HypothesisVerdict.REFUTED

    def test_role_without_api_permission_blocks(self, ec2_experiment, paper_state, detector):
        paper_state.roles["EC2-CloudWatch-Agent-Role"].permissions = ["s3:ListBuckets"]
        report = run_experiment(ec2_experiment, paper_state, detector)
        assert report.stage_results[-1].status is StageStatus.BLOCKED
        # the spot launch already raised the expected finding, so still confirmed
        assert report.hypothesis_verdict is HypothesisVerdict.CONFIRMED

    def test_prior_findings_error_out(self, ec2_experiment, paper_state, detector):
        from adforge.mockcloud import Finding
        paper_state.findings.append(Finding(type="X:Y/Z", severity="LOW", timestamp="t"))
        report = run_experiment(ec2_experiment, paper_state, detector)
        assert report.stage_results[0].status is StageStatus.ERROR
        assert len(report.stage_results) == 1
        assert report.hypothesis_verdict is HypothesisVerdict.INCONCLUSIVE

    def test_initial_state_never_mutated(self, ec2_experiment, paper_state, detector):
        snapshot = json.dumps(paper_state.to_dict(), sort_keys=True)
        run_experiment(ec2_experiment, paper_state, detector)
        assert json.dumps(paper_state.to_dict(), sort_keys=True) == snapshot

    def test_deterministic_reports(self, ec2_experiment, paper_state, detector):
        a = run_experiment(ec2_experiment, paper_state, detector, seed=7)
        b = run_experiment(ec2_experiment, paper_state, detector, seed=7)
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
        c = run_experiment(ec2_experiment, paper_state, detector, seed=8)
        assert a.to_dict()["stage_results"][1]["observed"] != c.to_dict()["stage_results"][1]["observed"]

    def test_unknown_expected_finding_rejected(self, ec2_experiment, paper_state, detector):
        ec2_experiment.hypothesis.expected_finding = "Nope:Not/Known"
        with pytest.raises(ValidationError):
            run_experiment(ec2_experiment, paper_state, detector)

    def test_listener_and_custom_stages(self, paper_state, detector):
        exp = SCEExperiment(
            name="listener-run",
            observability="watching",
            steady_state=["findings_empty"],
            hypothesis=ec2_hypothesis(),
            stages=[
                Stage(name="listen", action=StageAction.START_LISTENER,
                      params={"listener_port": "9001"}),
                Stage(name="odd", action=StageAction.CUSTOM, params={}),
            ],
        )
        report = run_experiment(exp, paper_state, detector)
        assert [r.status for r in report.stage_results] == [StageStatus.SUCCESS] * 2
        assert "9001" in report.stage_results[0].observed
        assert report.hypothesis_verdict is HypothesisVerdict.REFUTED

    def test_extract_without_instance_errors(self, paper_state, detector):
        exp = SCEExperiment(
            name="orphan-extract",
            observability="watching",
            steady_state=["findings_empty"],
            hypothesis=ec2_hypothesis(),
            stages=[Stage(name="grab", action=StageAction.EXTRACT_CREDENTIALS, params={})],
        )
        report = run_experiment(exp, paper_state, detector)
        assert report.stage_results[0].status is StageStatus.ERROR
        assert report.hypothesis_verdict is HypothesisVerdict.INCONCLUSIVE


def ec2_hypothesis():
    from adforge.sce import Hypothesis
    return Hypothesis(text="detector sees the launch",
                      expected_finding="UnauthorizedAccess:EC2/SuspiciousUserData")


class TestStateSerialization:
    def test_state_round_trip(self, paper_state):
        again = MockCloudState.from_dict(paper_state.to_dict())
        assert again.to_dict() == paper_state.to_dict()

    def test_duplicate_instance_ids_rejected(self, paper_state):
        from adforge.mockcloud import Instance
        paper_state.instances = [
            Instance(id="i-1", role_name="EC2-CloudWatch-Agent-Role", user_data=""),
            Instance(id="i-1", role_name="EC2-CloudWatch-Agent-Role", user_data=""),
        ]
        with pytest.raises(ValidationError):
            paper_state.validate()

    def test_unknown_role_reference_rejected(self, paper_state):
        from adforge.mockcloud import Instance
        paper_state.instances = [Instance(id="i-1", role_name="ghost", user_data="")]
        with pytest.raises(ValidationError):
            paper_state.validate()
