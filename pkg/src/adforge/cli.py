"""Command line entry points: score, flow, experiment, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .backends import make_backend
from .config import AppConfig
from .dot import emit_dot, parse_dot
from .errors import (
    AdforgeError,
    EmptyTreeError,
    NotFoundError,
    ParseError,
    StructureError,
    UnusableBranchError,
    ValidationError,
)
from .flow import (
    BranchMode,
    PromptSpec,
    Verdict,
    apply_cosmetics,
    merge_candidates,
    request_branch,
    send_insert_prompt,
    start_session,
    submit_validation,
)
from .metrics import MetricReport, ReferenceOrder, TechniqueCatalog, tree_score
from .mockcloud import DetectorConfig, HypothesisVerdict, MockCloudState, run_experiment
from .model import StyleSheet, extract_branch
from .sce import ScenarioDefaults, compile_experiment
from .service import SCHEMA_VERSION, create_app
from .store import SessionStore

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY_TREE = 3
EXIT_REFUTED = 4
EXIT_INCONCLUSIVE = 5
EXIT_UNUSABLE = 6


def _fail(exc: Exception, exit_code: int) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(exit_code)


def _report_json(report: MetricReport) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "report": report.to_dict()}, indent=2) + "\n"


def _report_table(report: MetricReport) -> str:
    rows = [
        ("attack nodes (n)", str(report.n)),
        ("mitre_score", f"{report.mitre_score:.2f}"),
        ("ordered_score", f"{report.ordered_score:.2f}"),
        ("usable_score", f"{report.usable_score:.2f}"),
        ("tree_score", f"{report.tree_score:.2f}"),
        ("deviated nodes (N_d)", str(report.n_d)),
        ("dead-end nodes (N_sc)", str(report.n_sc)),
    ]
    width = max(len(name) for name, _ in rows)
    lines = [f"{name:<{width}}  {value}" for name, value in rows]
    flagged = [nid for nid, f in sorted(report.per_node.items()) if not (f.m and f.c and f.i and f.r)]
    if flagged:
        lines.append("")
        lines.append("nodes with missing annotations (m/c/i/r):")
        for nid in flagged:
            f = report.per_node[nid]
            lines.append(f"  {nid}: m={f.m} c={f.c} i={f.i} r={f.r}")
    return "\n".join(lines) + "\n"


@click.group()
def main() -> None:
    """Attack-defense tree workbench."""


@main.command()
@click.argument("tree_path", type=click.Path())
@click.option("--catalog", "catalog_path", type=click.Path(), default=None,
              help="Technique catalog JSON (default: bundled snapshot).")
@click.option("--reference", "reference_path", type=click.Path(), default=None,
              help="Reference order file (newline-separated node ids).")
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
def score(tree_path: str, catalog_path: str | None, reference_path: str | None,
          as_json: bool) -> None:
    """Score a tree: technique grounding, ordering, usability, and the mean."""
    try:
        text = Path(tree_path).read_text("utf-8")
    except OSError as exc:
        _fail(exc, EXIT_INPUT)
    try:
        tree = parse_dot(text)
        catalog = TechniqueCatalog.load(catalog_path)
        reference = ReferenceOrder.from_file(reference_path) if reference_path else None
        report = tree_score(tree, catalog, reference)
    except EmptyTreeError as exc:
        _fail(exc, EXIT_EMPTY_TREE)
    except (ParseError, StructureError, ValidationError, OSError) as exc:
        _fail(exc, EXIT_INPUT)
    click.echo(_report_json(report) if as_json else _report_table(report), nl=False)


def _run_script_op(session, backend, catalog, op: dict) -> None:
    kind = op.get("op")
    if kind == "insert":
        send_insert_prompt(session, backend, catalog)
    elif kind == "branch":
        resource_doc = op.get("resource_doc")
        if op.get("resource_doc_path"):
            resource_doc = Path(op["resource_doc_path"]).read_text("utf-8")
        request_branch(
            session, backend, BranchMode(op.get("mode", "generalized")),
            component=op.get("component"), resource_doc=resource_doc, catalog=catalog,
        )
    elif kind == "merge":
        merge_candidates(session, root_label=op.get("root_label"), catalog=catalog)
    elif kind == "cosmetics":
        style = StyleSheet.from_dict(op["style"]) if op.get("style") else None
        apply_cosmetics(session, backend, style=style,
                        restructure=op.get("restructure"), catalog=catalog)
    elif kind == "validate":
        submit_validation(session, Verdict(op.get("verdict", "accept")),
                          feedback=op.get("feedback"), backend=backend, catalog=catalog)
    else:
        raise ValidationError(f"script: unknown op '{kind}'")


def _flow_repl(session, backend, catalog) -> None:
    click.echo("commands: insert | branch [component] | specific <doc-path> [component] | "
               "merge | style <kind=color,...> | restructure <text> | refine <feedback> | "
               "accept | show | quit")
    while True:
        try:
            line = click.prompt(f"[{session.phase.value}]", prompt_suffix="> ").strip()
        except (EOFError, click.Abort):
            return
        if not line:
            continue
        cmd, _, rest = line.partition(" ")
        try:
            if cmd == "quit":
                return
            elif cmd == "show":
                if session.candidates:
                    click.echo(emit_dot(session.candidates[-1].tree))
                else:
                    click.echo("(no candidates yet)")
            elif cmd == "insert":
                send_insert_prompt(session, backend, catalog)
            elif cmd == "branch":
                request_branch(session, backend, BranchMode.GENERALIZED,
                               component=rest or None, catalog=catalog)
                click.echo(f"candidates: {len(session.candidates)}")
            elif cmd == "specific":
                doc_path, _, component = rest.partition(" ")
                request_branch(session, backend, BranchMode.SPECIFIC,
                               component=component or None,
                               resource_doc=Path(doc_path).read_text("utf-8"),
                               catalog=catalog)
            elif cmd == "merge":
                merge_candidates(session, catalog=catalog)
            elif cmd == "style":
                kinds = {}
                for clause in rest.split(","):
                    kind, _, color = clause.partition("=")
                    kinds[kind.strip()] = {"fillcolor": color.strip()}
                apply_cosmetics(session, backend, style=StyleSheet.from_dict(kinds), catalog=catalog)
            elif cmd == "restructure":
                apply_cosmetics(session, backend, restructure=rest, catalog=catalog)
            elif cmd == "refine":
                submit_validation(session, Verdict.REFINE, feedback=rest,
                                  backend=backend, catalog=catalog)
            elif cmd == "accept":
                submit_validation(session, Verdict.ACCEPT, backend=backend, catalog=catalog)
                return
            else:
                click.echo(f"unknown command '{cmd}'", err=True)
        except AdforgeError as exc:
            click.echo(f"error: {exc}", err=True)


@main.command()
@click.argument("spec_path", type=click.Path())
@click.option("--backend", "backend_spec", required=True,
              help="Backend: mock:<transcript.json> or a chat-completion URL.")
@click.option("--model", default="default", help="Model name for HTTP backends.")
@click.option("--script", "script_path", type=click.Path(), default=None,
              help="Replay a fixed op sequence (JSON list) instead of the REPL.")
@click.option("--state-dir", default="sessions", show_default=True)
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--session-id", default=None, help="Session id (default: random).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Where to write the accepted tree (.dot).")
def flow(spec_path: str, backend_spec: str, model: str, script_path: str | None,
         state_dir: str, catalog_path: str | None, session_id: str | None,
         out_path: str | None) -> None:
    """Drive a generation session from a prompt-spec file."""
    try:
        spec = PromptSpec.load(spec_path)
        backend = make_backend(backend_spec, model=model)
        catalog = TechniqueCatalog.load(catalog_path)
    except (OSError, AdforgeError) as exc:
        _fail(exc, EXIT_INPUT)

    store = SessionStore(state_dir)
    try:
        session = start_session(spec, backend, session_id=session_id)
    except AdforgeError as exc:
        partial = getattr(exc, "session", None)
        if partial is not None:
            store.save(partial)
        _fail(exc, 1)
    store.save(session)
    click.echo(f"session: {session.id}")

    try:
        if script_path:
            ops = json.loads(Path(script_path).read_text("utf-8"))
            for op in ops:
                _run_script_op(session, backend, catalog, op)
                store.save(session)
        else:
            _flow_repl(session, backend, catalog)
            store.save(session)
    except (OSError, AdforgeError) as exc:
        store.save(session)
        _fail(exc, 1)

    if session.accepted_tree is not None:
        target = Path(out_path) if out_path else Path(state_dir) / f"{session.id}.accepted.dot"
        target.write_text(emit_dot(session.accepted_tree), "utf-8")
        click.echo(f"accepted tree written to {target}")
    click.echo(f"phase: {session.phase.value}, candidates: {len(session.candidates)}")


@main.command()
@click.argument("tree_path", type=click.Path())
@click.option("--goal", "goal_id", required=True, help="Goal node id to compile toward.")
@click.option("--leaf-hint", default=None, help="Node that selects the branch.")
@click.option("--state", "state_path", type=click.Path(), required=True,
              help="Mock cloud initial state (JSON).")
@click.option("--detector", "detector_path", type=click.Path(), required=True,
              help="Detector rules (JSON).")
@click.option("--defaults", "defaults_path", type=click.Path(), default=None,
              help="Scenario defaults (YAML).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Also write the report JSON here.")
def experiment(tree_path: str, goal_id: str, leaf_hint: str | None, state_path: str,
               detector_path: str, defaults_path: str | None, seed: int,
               out_path: str | None) -> None:
    """Compile a branch into an experiment and run it on the mock cloud."""
    try:
        tree = parse_dot(Path(tree_path).read_text("utf-8"))
        initial = MockCloudState.load(state_path)
        detector = DetectorConfig.load(detector_path)
        defaults = ScenarioDefaults.load(defaults_path) if defaults_path else None
        branch = extract_branch(tree, goal_id, leaf_hint)
    except UnusableBranchError as exc:
        _fail(exc, EXIT_UNUSABLE)
    except (OSError, ParseError, StructureError, NotFoundError, ValidationError) as exc:
        _fail(exc, EXIT_INPUT)

    try:
        exp = compile_experiment(branch, tree, defaults)
        report = run_experiment(exp, initial, detector, seed=seed)
    except UnusableBranchError as exc:
        _fail(exc, EXIT_UNUSABLE)
    except AdforgeError as exc:
        _fail(exc, EXIT_INPUT)

    body = json.dumps({"schema_version": SCHEMA_VERSION, "report": report.to_dict()}, indent=2) + "\n"
    click.echo(body, nl=False)
    if out_path:
        Path(out_path).write_text(body, "utf-8")
    sys.exit({
        HypothesisVerdict.CONFIRMED: EXIT_OK,
        HypothesisVerdict.REFUTED: EXIT_REFUTED,
        HypothesisVerdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    }[report.hypothesis_verdict])


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="AppConfig YAML.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--state-dir", default=None)
@click.option("--backend", "backend_spec", default=None,
              help="Backend: mock:<transcript.json> or a chat-completion URL.")
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--ui-dir", default=None, help="Static analyst UI directory.")
def serve(config_path: str | None, host: str | None, port: int | None,
          state_dir: str | None, backend_spec: str | None,
          catalog_path: str | None, ui_dir: str | None) -> None:
    """Run the HTTP JSON API (and the analyst UI when built)."""
    import uvicorn

    try:
        config = AppConfig.load(config_path) if config_path else AppConfig()
        if host:
            config.host = host
        if port:
            config.port = port
        if state_dir:
            config.state_dir = state_dir
        if backend_spec:
            config.backend = backend_spec
        if catalog_path:
            config.catalog_path = catalog_path
        if ui_dir:
            config.ui_dir = ui_dir
        app = create_app(config)
    except (OSError, AdforgeError) as exc:
        _fail(exc, EXIT_INPUT)
    uvicorn.run(app, host=config.host, port=config.port, log_level=config.log_level)


if __name__ == "__main__":
    main()
