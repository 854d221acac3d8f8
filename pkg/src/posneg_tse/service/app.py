"""HTTP surface: session upload, labeling, extraction, result delivery.

All JSON fields are snake_case, times are seconds as decimals, and errors
come back as ``{"code": ..., "message": ...}`` with a matching HTTP status.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .engine import (
    ModelRegistry,
    ServiceConfig,
    ServiceError,
    decode_upload,
    request_fingerprint,
    run_extraction,
    validate_labels,
    wav_bytes,
)
from .store import SessionStore

INFERENCE_SLOTS = 2  # bounded worker pool for model execution


def session_json(session) -> dict:
    d = session.to_dict()
    d.pop("request_fingerprint", None)
    if session.result_blob:
        d["result_url"] = f"/v1/sessions/{session.id}/result"
    return d


def create_app(data_dir: str | Path, model_dir: str | Path,
               config: ServiceConfig | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    cfg = config or ServiceConfig()
    store = SessionStore(data_dir)
    registry = ModelRegistry(model_dir)
    inference_gate = threading.Semaphore(INFERENCE_SLOTS)

    app = FastAPI(title="posneg-tse extraction service")
    app.state.store = store
    app.state.registry = registry
    app.state.config = cfg

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.post("/v1/sessions")
    def create_session(file: UploadFile):
        data = file.file.read()
        wave, original = decode_upload(data, cfg)
        session = store.new_session(
            source_blob=store.put_blob(wav_bytes(wave)),
            duration_s=wave.duration_s,
            sample_rate=wave.sample_rate,
            original_format=original,
        )
        return {"id": session.id, "duration_s": session.duration_s}

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return session_json(_get(store, session_id))

    @app.put("/v1/sessions/{session_id}/labels")
    def set_labels(session_id: str, labels: list[dict]):
        with store.lock(session_id):
            session = _get(store, session_id)
            parsed, pseudo = validate_labels(labels, session.duration_s, cfg)
            session.labels = parsed
            session.pseudo_negative = pseudo
            session.status = "labeled"
            session.result_blob = None       # label edits invalidate results
            session.result_meta = {}
            session.request_fingerprint = None
            store.save(session)
            return session_json(session)

    @app.post("/v1/sessions/{session_id}/extract")
    def extract_session(session_id: str, body: dict | None = None):
        body = body or {}
        span = tuple(body["span"]) if body.get("span") else None
        model_id = body.get("model")
        mixture_session = body.get("mixture_session")
        fingerprint = request_fingerprint(
            list(span) if span else None, model_id, mixture_session)
        with store.lock(session_id):
            session = _get(store, session_id)
            if session.status == "created":
                raise ServiceError(409, "not_labeled",
                                   "set labels before extracting")
            if session.status == "done" and \
                    session.request_fingerprint == fingerprint:
                return _extract_response(session)   # idempotent replay
            session.status = "extracting"
            store.save(session)
            try:
                with inference_gate:
                    session = run_extraction(store, registry, session, span,
                                             model_id, mixture_session, cfg)
                session.request_fingerprint = fingerprint
            except ServiceError:
                session.status = "labeled"
                store.save(session)
                raise
            except Exception as exc:  # model failure -> failed with diagnostic
                session.status = "failed"
                session.error = f"{type(exc).__name__}: {exc}"
                store.save(session)
                raise ServiceError(500, "extraction_failed", session.error)
            store.save(session)
            return _extract_response(session)

    @app.get("/v1/sessions/{session_id}/result")
    def get_result(session_id: str):
        session = _get(store, session_id)
        if session.status == "failed":
            raise ServiceError(500, "extraction_failed",
                               session.error or "extraction failed")
        if session.status != "done" or not session.result_blob:
            raise ServiceError(404, "no_result", "extraction not finished")
        data = store.blob_path(session.result_blob).read_bytes()
        return Response(content=data, media_type="audio/wav")

    @app.get("/v1/models")
    def list_models():
        return registry.list_models()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")

    return app


def _get(store: SessionStore, session_id: str):
    try:
        return store.get(session_id)
    except KeyError:
        raise ServiceError(404, "unknown_session",
                           f"no session {session_id!r}") from None


def _extract_response(session) -> dict:
    out = {"status": session.status,
           "result_url": f"/v1/sessions/{session.id}/result"}
    out.update(session.result_meta)
    return out
