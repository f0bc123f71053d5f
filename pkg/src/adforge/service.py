"""HTTP JSON API over the workbench, consumed by the analyst UI.

Every response body carries `schema_version`; errors come back as
`{code, message, detail}` with 400 (validation), 404 (unknown resource),
409 (illegal phase transition), or 502 (backend failure).
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .backends import make_backend
from .config import AppConfig
from .dot import emit_dot, parse_dot
from .errors import (
    AdforgeError,
    BackendError,
    NoDotFoundError,
    NotFoundError,
    ParseError,
    StructureError,
    ValidationError,
)
from .flow import (
    BranchMode,
    Verdict,
    apply_cosmetics,
    merge_candidates,
    request_branch,
    send_insert_prompt,
    start_session,
    submit_validation,
    PromptSpec,
)
from .metrics import ReferenceOrder, TechniqueCatalog, tree_score
from .mockcloud import DetectorConfig, MockCloudState, run_experiment
from .model import StyleSheet, extract_branch
from .sce import SCEExperiment, ScenarioDefaults, compile_experiment
from .store import SessionStore

SCHEMA_VERSION = "1"

_STATUS_BY_CODE = {
    "validation_error": 400,
    "parse_error": 400,
    "structure_error": 400,
    "no_dot_found": 400,
    "empty_tree": 400,
    "unknown_check": 400,
    "unusable_branch": 400,
    "not_found": 404,
    "illegal_phase": 409,
    "precondition_error": 409,
    "backend_error": 502,
}


def _ok(payload: dict, status_code: int = 200) -> JSONResponse:
    return JSONResponse({"schema_version": SCHEMA_VERSION, **payload}, status_code=status_code)


def _require(payload: dict, key: str) -> object:
    if key not in payload or payload[key] in (None, ""):
        raise ValidationError(f"request body needs '{key}'")
    return payload[key]


def create_app(config: AppConfig) -> FastAPI:
    config.validate()
    app = FastAPI(title="adforge", version=__version__)
    store = SessionStore(config.state_dir)
    catalog = TechniqueCatalog.load(config.catalog_path)
    backend = make_backend(config.backend)

    @app.exception_handler(AdforgeError)
    async def _adforge_error(_req: Request, exc: AdforgeError) -> JSONResponse:
        status = _STATUS_BY_CODE.get(exc.code, 400)
        detail = {}
        if isinstance(exc, BackendError):
            detail = {"status": exc.status}
            session = getattr(exc, "session", None)
            if session is not None:
                store.save(session)
                detail["session_id"] = session.id
        if hasattr(exc, "node_ids"):
            detail["node_ids"] = exc.node_ids
        if hasattr(exc, "dot_source"):
            detail["dot_source"] = exc.dot_source
        return JSONResponse(
            {"code": exc.code, "message": str(exc), "detail": detail},
            status_code=status,
        )

    @app.exception_handler(RequestValidationError)
    async def _body_error(_req: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            {"code": "validation_error", "message": "malformed request body", "detail": exc.errors()},
            status_code=400,
        )

    def _mutate(session_id: str, fn):
        """Load-modify-save under the session lock.

        Failed transitions persist nothing; reply-parsing failures persist
        the transcript so the analyst can inspect the offending reply.
        """
        with store.lock(session_id):
            session = store.load(session_id)
            try:
                result = fn(session)
            except (NoDotFoundError, ParseError, StructureError):
                store.save(session)
                raise
            store.save(session)
            return result

    # -- sessions ----------------------------------------------------------

    @app.post("/sessions")
    async def create_session(payload: dict) -> JSONResponse:
        spec = PromptSpec.from_dict(_require(payload, "spec"))
        session = start_session(spec, backend)
        store.save(session)
        return _ok({"session": session.to_dict()}, status_code=201)

    @app.get("/sessions")
    async def list_sessions() -> JSONResponse:
        return _ok({"sessions": store.list_ids()})

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str) -> JSONResponse:
        return _ok({"session": store.load(session_id).to_dict()})

    @app.post("/sessions/{session_id}/insert")
    async def insert_prompt(session_id: str) -> JSONResponse:
        session = _mutate(session_id, lambda s: send_insert_prompt(s, backend, catalog))
        return _ok({"session": session.to_dict()})

    @app.post("/sessions/{session_id}/branch")
    async def branch(session_id: str, payload: dict) -> JSONResponse:
        try:
            mode = BranchMode(payload.get("mode", "generalized"))
        except ValueError:
            raise ValidationError(f"unknown branch mode '{payload.get('mode')}'") from None

        def op(session):
            request_branch(
                session, backend, mode,
                component=payload.get("component"),
                resource_doc=payload.get("resource_doc"),
                catalog=catalog,
            )
            return session

        return _ok({"session": _mutate(session_id, op).to_dict()})

    @app.post("/sessions/{session_id}/merge")
    async def merge(session_id: str, payload: dict | None = None) -> JSONResponse:
        root_label = (payload or {}).get("root_label")

        def op(session):
            merge_candidates(session, root_label=root_label, catalog=catalog)
            return session

        return _ok({"session": _mutate(session_id, op).to_dict()})

    @app.post("/sessions/{session_id}/cosmetics")
    async def cosmetics(session_id: str, payload: dict) -> JSONResponse:
        style = StyleSheet.from_dict(payload["style"]) if payload.get("style") else None

        def op(session):
            apply_cosmetics(
                session, backend,
                style=style,
                restructure=payload.get("restructure"),
                catalog=catalog,
            )
            return session

        return _ok({"session": _mutate(session_id, op).to_dict()})

    @app.post("/sessions/{session_id}/validate")
    async def validate(session_id: str, payload: dict) -> JSONResponse:
        try:
            verdict = Verdict(_require(payload, "verdict"))
        except ValueError:
            raise ValidationError(f"unknown verdict '{payload.get('verdict')}'") from None

        def op(session):
            return submit_validation(
                session, verdict,
                feedback=payload.get("feedback"),
                backend=backend,
                catalog=catalog,
            )

        return _ok({"session": _mutate(session_id, op).to_dict()})

    @app.get("/sessions/{session_id}/tree.dot")
    async def tree_dot(session_id: str) -> PlainTextResponse:
        session = store.load(session_id)
        tree = session.accepted_tree
        if tree is None:
            if not session.candidates:
                raise NotFoundError(f"session '{session_id}' has no tree yet")
            tree = session.candidates[-1].tree
        return PlainTextResponse(emit_dot(tree), media_type="text/vnd.graphviz")

    # -- scoring and experiments --------------------------------------------

    @app.post("/score")
    async def score(payload: dict) -> JSONResponse:
        tree = parse_dot(str(_require(payload, "dot")))
        reference = None
        if payload.get("reference"):
            reference = ReferenceOrder([str(e) for e in payload["reference"]])
        report = tree_score(tree, catalog, reference)
        return _ok({"report": report.to_dict()})

    @app.post("/experiments/compile")
    async def experiments_compile(payload: dict) -> JSONResponse:
        tree = parse_dot(str(_require(payload, "tree_dot")))
        goal_id = str(_require(payload, "goal_id"))
        branch = extract_branch(tree, goal_id, payload.get("leaf_hint"))
        defaults = (
            ScenarioDefaults.from_dict(payload["defaults"])
            if payload.get("defaults") else None
        )
        experiment = compile_experiment(branch, tree, defaults)
        return _ok({"experiment": experiment.to_dict()})

    @app.post("/experiments/run")
    async def experiments_run(payload: dict) -> JSONResponse:
        experiment = SCEExperiment.from_dict(_require(payload, "experiment"))
        initial = MockCloudState.from_dict(_require(payload, "initial_state"))
        detector = DetectorConfig.from_dict(_require(payload, "detector"))
        report = run_experiment(experiment, initial, detector, seed=int(payload.get("seed", 0)))
        return _ok({"report": report.to_dict()})

    @app.get("/healthz")
    async def healthz() -> JSONResponse:
        return _ok({"status": "ok"})

    ui_dir = config.ui_dir
    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = "frontend/dist"
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
