"""HTTP surface: /ask, /feedback, /ingest/*, /intents, /healthz.

All bodies are UTF-8 JSON; errors come back as ``{"code", "message",
"detail"}`` (see docs/api.md for the full field reference). Endpoints are
synchronous functions, so the framework runs them on its thread pool and
the engine's reader/writer locking does the rest.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from fastapi import FastAPI, Header, Request, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import AskResult, Engine
from .errors import (
    ArityMismatch,
    EmptyInput,
    InvalidLabel,
    InvalidRequest,
    KbqaError,
    NoTemplateForIntent,
    UnknownFormat,
    UnknownSession,
    UnresolvedIntent,
    WrongState,
)
from .respond import AnswerPayload

INGEST_KINDS = ("triples", "seeds", "templates", "rules")


class AskBody(BaseModel):
    question: str
    lang: str | None = None
    session_id: str | None = None


class FeedbackBody(BaseModel):
    session_id: str
    step: str
    value: bool | str


def payload_view(payload: AnswerPayload) -> dict:
    r = payload.recognition
    return {
        "answer_text": payload.answer_text,
        "rows": [row.as_dict() for row in payload.rows],
        "recognition": {
            "label": r.label,
            "method": r.method,
            "score": r.score,
            "is_new_intent": r.is_new_intent,
        },
        "cql": payload.cql,
        "render_method": payload.render_method,
        "trace": [{"stage": s.stage, "detail": s.detail} for s in payload.trace],
    }


def error_view(exc: KbqaError) -> tuple[int, dict]:
    """Map module errors onto (status, ApiError body)."""
    code, status, detail = "internal", 500, {}
    if isinstance(exc, EmptyInput):
        code, status = "empty_input", 400
    elif isinstance(exc, (InvalidRequest, InvalidLabel)):
        code, status = "invalid_input", 400
    elif isinstance(exc, UnresolvedIntent):
        code = "unresolved_intent"
        status = 503 if exc.caused_by_outage else 400
    elif isinstance(exc, NoTemplateForIntent):
        code, status = "no_template", 400
        detail = {"intent": exc.label}
        if exc.session_id:
            detail["session_id"] = exc.session_id
    elif isinstance(exc, ArityMismatch):
        code, status = "arity_mismatch", 400
        detail = {"expected": exc.expected, "got": exc.got}
    elif isinstance(exc, WrongState):
        code, status = "wrong_state", 409
    elif isinstance(exc, UnknownSession):
        code, status = "unknown_session", 404
    elif isinstance(exc, UnknownFormat):
        code, status = "invalid_input", 415
    return status, {"code": code, "message": str(exc), "detail": detail}


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="kbqa", docs_url=None, redoc_url=None)
    app.state.engine = engine

    @app.exception_handler(KbqaError)
    def _kbqa_error(_request: Request, exc: KbqaError) -> JSONResponse:
        status, body = error_view(exc)
        return JSONResponse(status_code=status, content=body)

    @app.post("/ask")
    def ask(body: AskBody) -> JSONResponse:
        result: AskResult = engine.ask(
            body.question, lang=body.lang, session_id=body.session_id
        )
        return JSONResponse(
            {
                "answer": payload_view(result.payload),
                "session_id": result.session.id,
                "session_state": result.session.state.value,
            }
        )

    @app.post("/feedback")
    def feedback(body: FeedbackBody) -> JSONResponse:
        text, state = engine.feedback_step(body.session_id, body.step, body.value)
        return JSONResponse({"text": text, "state": state})

    @app.post("/ingest/{kind}")
    def ingest_endpoint(
        kind: str, file: UploadFile, authorization: str | None = Header(default=None)
    ) -> JSONResponse:
        token = engine.config.auth_token
        if not token or authorization != f"Bearer {token}":
            return JSONResponse(
                status_code=401,
                content={"code": "unauthorized", "message": "missing or bad bearer token", "detail": {}},
            )
        if kind not in INGEST_KINDS:
            raise UnknownFormat(f"unknown ingest kind {kind!r}")
        suffix = Path(file.filename or "upload.jsonl").suffix or ".jsonl"
        with tempfile.NamedTemporaryFile(suffix=suffix, delete=False) as tmp:
            tmp.write(file.file.read())
            tmp_path = tmp.name
        try:
            report = engine.ingest_file(kind, tmp_path)
        finally:
            Path(tmp_path).unlink(missing_ok=True)
        return JSONResponse(report.as_dict())

    @app.get("/intents")
    def intents() -> JSONResponse:
        return JSONResponse({"intents": engine.intents_view()})

    @app.get("/healthz")
    def healthz() -> JSONResponse:
        return JSONResponse(engine.health(budget=1.0))

    ui_dir = engine.config.ui_dir
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
