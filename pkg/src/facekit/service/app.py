"""HTTP face of the experiment service.

Thin JSON layer over SessionStore plus a PNG stimulus endpoint.  The wire
protocol never carries correctness during an active session; the export
endpoint, which does include it, sits behind a bearer token.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Header, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from facekit.errors import (
    DuplicateActiveSession,
    DuplicateSubmission,
    FacekitError,
    RtOutOfRange,
    SessionComplete,
    UnknownSession,
    UnknownTrial,
)
from facekit.records import CONDITIONS
from facekit.service.store import DESIGNS, SessionStore

_NO_CACHE = {
    "Cache-Control": "no-store, no-cache, must-revalidate",
    "Pragma": "no-cache",
}

_STATUS = {
    UnknownSession: 404,
    DuplicateActiveSession: 409,
    DuplicateSubmission: 409,
    UnknownTrial: 400,
    RtOutOfRange: 400,
}


class CreateSessionBody(BaseModel):
    subject_id: str
    design: str = "plain_race"
    seed: int = 0


class SubmitBody(BaseModel):
    trial_index: int
    choice: str
    rt_ms: float | None = None
    presented_at: float | None = None


def directory_stimuli(root) -> Callable[[str, str], bytes | None]:
    """Stimulus provider over ``root/<condition>/<face_id>.png``."""
    base = Path(root)

    def fetch(face_id: str, condition: str) -> bytes | None:
        if "/" in face_id or "\\" in face_id or face_id.startswith("."):
            return None
        path = base / condition / f"{face_id}.png"
        if not path.exists():
            return None
        return path.read_bytes()

    return fetch


def create_app(store: SessionStore,
               stimuli: Callable[[str, str], bytes | None] | str | Path | None = None,
               token: str | None = None) -> FastAPI:
    """Build the service app.

    ``stimuli`` is a directory (see directory_stimuli) or a callable
    returning PNG bytes; ``token``, when set, guards the export endpoint.
    """
    if stimuli is None:
        fetch = lambda face_id, condition: None  # noqa: E731
    elif callable(stimuli):
        fetch = stimuli
    else:
        fetch = directory_stimuli(stimuli)

    app = FastAPI(title="face experiment service", docs_url=None, redoc_url=None)
    # browser clients are typically served from a different origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["Authorization", "Content-Type"],
    )

    @app.exception_handler(FacekitError)
    async def _on_error(request, exc: FacekitError):
        status = _STATUS.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if body.design not in DESIGNS:
            return JSONResponse(
                status_code=400,
                content={"error": "UnknownDesign",
                         "detail": f"design must be one of {list(DESIGNS)}"},
            )
        s = store.create_session(body.subject_id, body.design, body.seed)
        return {
            "session_id": s.session_id,
            "subject_id": s.subject_id,
            "design": s.design,
            "block_order": list(s.block_order),
            "n_trials": len(s.pending),
            "created_at": s.created_at,
        }

    @app.get("/sessions/{session_id}/next")
    def next_trial(session_id: str):
        try:
            return store.next_trial(session_id)
        except SessionComplete:
            return {"complete": True}

    @app.post("/sessions/{session_id}/responses")
    def submit(session_id: str, body: SubmitBody):
        return store.submit_response(
            session_id, body.trial_index, body.choice, body.rt_ms,
            body.presented_at,
        )

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, authorization: str | None = Header(default=None)):
        if token is not None and authorization != f"Bearer {token}":
            return JSONResponse(
                status_code=401,
                content={"error": "Unauthorized", "detail": "bearer token required"},
            )
        records = store.export_session(session_id)
        body = "".join(r.to_json() + "\n" for r in records)
        return PlainTextResponse(body, media_type="application/x-ndjson")

    @app.get("/stimuli/{face_id}")
    def stimulus(face_id: str, condition: str = Query(default="none")):
        if condition not in CONDITIONS:
            return JSONResponse(
                status_code=400,
                content={"error": "UnknownCondition",
                         "detail": f"condition must be one of {list(CONDITIONS)}"},
            )
        data = fetch(face_id, condition)
        if data is None:
            return JSONResponse(
                status_code=404,
                content={"error": "UnknownFaceId", "detail": face_id},
            )
        return Response(content=data, media_type="image/png", headers=_NO_CACHE)

    return app
