"""HTTP service exposing the analysis pipeline.

Endpoints::

    GET  /healthz                          liveness
    POST /sessions                         multipart upload -> 201 {session_id}
    GET  /sessions/{id}/features           FeatureProfile JSON
    GET  /sessions/{id}/description        DescriptionDocument JSON
    GET  /sessions/{id}/reconstruction.png replayed raster
    GET  /sessions/{id}/prompt             assembled prompt text
    POST /corpus                           build the retrieval index (409 while
                                           a build is running)
    GET  /corpus/status                    index state

Responses served for a session are the stored artifact bytes, so the CLI
and the API return identical content for identical inputs.
"""

from __future__ import annotations

import json
import threading

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse

from .config import Config
from .errors import EmptyCorpus, InkError, MalformedJson
from .pipeline import RecordStore, run_pipeline
from .retrieval import build_index

_ERROR_STATUS = {"EmptyIndex": 409}


def _parse_canvas(raw: str | None) -> tuple[int, int] | None:
    if not raw:
        return None
    try:
        w, h = raw.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise MalformedJson(f"canvas must look like 800x600, got {raw!r}") from None


def create_app(config: Config | None = None, embedder=None,
               store: RecordStore | None = None) -> FastAPI:
    config = config or Config.from_env()
    embedder = embedder or config.make_embedder()
    store = store or RecordStore(config.records_dir)

    app = FastAPI(title="inktrace", version="0.1.0")
    state = app.state
    state.config = config
    state.embedder = embedder
    state.store = store
    state.index = None
    state.index_building = False
    state.index_lock = threading.Lock()
    state.index_error = None

    @app.exception_handler(InkError)
    async def ink_error_handler(_request: Request, exc: InkError):
        return JSONResponse(status_code=_ERROR_STATUS.get(exc.name, 400),
                            content={"error": exc.name, "detail": exc.detail})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def post_session(metadata: UploadFile = File(...),
                           image: UploadFile | None = File(None),
                           annotations: UploadFile | None = File(None),
                           questionnaire: UploadFile | None = File(None),
                           canvas: str | None = Form(None)):
        session_json = await metadata.read()
        final_png = await image.read() if image is not None else None
        annotations_json = (await annotations.read()
                            if annotations is not None else None)
        questionnaire_json = (await questionnaire.read()
                              if questionnaire is not None else None)
        result = run_pipeline(
            session_json,
            canvas=_parse_canvas(canvas),
            final_png=final_png,
            annotations_json=annotations_json,
            questionnaire_json=questionnaire_json,
            index=state.index,
            embedder=state.embedder,
            config=config)
        store.save(result)
        return {"session_id": result.session_id,
                "stages": result.stage_status}

    def _artifact_response(session_id: str, name: str,
                           media_type: str) -> Response:
        if not store.exists(session_id):
            return JSONResponse(status_code=404,
                                content={"error": "NotFound",
                                         "detail": session_id})
        manifest = store.manifest(session_id)
        if name not in manifest["artifacts"]:
            return JSONResponse(status_code=404,
                                content={"error": "NotFound",
                                         "detail": f"{session_id}/{name}"})
        return Response(content=store.read_artifact(session_id, name),
                        media_type=media_type)

    @app.get("/sessions/{session_id}/features")
    def get_features(session_id: str):
        return _artifact_response(session_id, "features.json",
                                  "application/json")

    @app.get("/sessions/{session_id}/description")
    def get_description(session_id: str):
        return _artifact_response(session_id, "description.json",
                                  "application/json")

    @app.get("/sessions/{session_id}/reconstruction.png")
    def get_reconstruction(session_id: str):
        return _artifact_response(session_id, "reconstruction.png", "image/png")

    @app.get("/sessions/{session_id}/prompt")
    def get_prompt(session_id: str):
        return _artifact_response(session_id, "prompt.txt",
                                  "text/plain; charset=utf-8")

    @app.post("/corpus", status_code=202)
    async def post_corpus(request: Request):
        body = await request.json()
        documents = [(d["name"], d["text"]) for d in body.get("documents", [])]
        if not documents:
            raise EmptyCorpus("no documents supplied")
        strategy = body.get("strategy", "semantic")
        with state.index_lock:
            if state.index_building:
                return JSONResponse(status_code=409,
                                    content={"error": "IndexBuildInProgress",
                                             "detail": "a build is running"})
            state.index_building = True
            state.index_error = None

        def build():
            try:
                index = build_index(
                    documents, strategy, state.embedder,
                    chunk_size=body.get("chunk_size", config.chunk_size),
                    chunk_overlap=body.get("chunk_overlap", config.chunk_overlap),
                    semantic_threshold=body.get("semantic_threshold",
                                                config.semantic_threshold),
                    k=body.get("k"),
                    seed=body.get("seed", config.kmeans_seed))
                state.index = index
            except Exception as exc:  # surfaced via /corpus/status
                state.index_error = str(exc)
            finally:
                state.index_building = False

        thread = threading.Thread(target=build, daemon=True)
        thread.start()
        return {"job": "index-build", "strategy": strategy,
                "documents": len(documents)}

    @app.get("/corpus/status")
    def corpus_status():
        if state.index_building:
            return {"state": "building"}
        if state.index_error:
            return {"state": "error", "detail": state.index_error}
        if state.index is None:
            return {"state": "empty"}
        return {"state": "ready", "strategy": state.index.strategy,
                "chunks": len(state.index.chunks),
                "provider_id": state.index.provider_id}

    @app.get("/config")
    def get_config():
        return json.loads(config.show("json"))

    return app
