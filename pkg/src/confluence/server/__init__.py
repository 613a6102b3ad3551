"""RESTful server for composing, storing, running, and sharing models.

Identity is a plain ``X-User`` request header (no passwords): whoever
posts a composition owns it, and only shared compositions are
readable by other callers.  Configuration comes from environment
variables: ``WMT_ROOT`` (store directory), ``WMT_PORT`` (default
8642), ``WMT_WORKERS`` (worker pool size, default 2), and ``WMT_UI``
(optional directory of browser-client files to serve at ``/``).
"""

import json
import os
import time

from fastapi import FastAPI, Header, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from ..component import ComponentError
from ..coupler import CompositionError, load_composition, validate_composition
from ..registry import (
    MetadataError,
    NotFoundError,
    describe,
    format_citation,
    list_components,
)
from .executor import RunExecutor
from .store import DocumentStore, RunRecord

DEFAULT_PORT = 8642


def _error(status, message):
    return JSONResponse(status_code=status, content={"error": message})


def _findings_payload(findings):
    return [
        {"kind": f.kind, "where": f.where, "message": f.message} for f in findings
    ]


def _check_body(body):
    """Parse and validate a composition document; (comp, findings, error)."""
    try:
        doc = json.loads(body)
    except ValueError as err:
        return None, None, "body is not valid JSON: {}".format(err)
    try:
        comp = load_composition(doc)
    except (CompositionError, ComponentError) as err:
        return None, None, str(err)
    return comp, validate_composition(comp), None


def create_app(root=None, workers=None, ui=None):
    if root is None:
        root = os.environ.get("WMT_ROOT", "wmt-store")
    if workers is None:
        workers = int(os.environ.get("WMT_WORKERS", "2"))
    if ui is None:
        ui = os.environ.get("WMT_UI")
    store = DocumentStore(root)
    executor = RunExecutor(store, workers=workers)
    executor.recover()

    app = FastAPI(title="model composition server")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.executor = executor

    # -- components --------------------------------------------------------

    @app.get("/api/components")
    def components():
        return [meta.as_dict() for meta in list_components()]

    @app.get("/api/components/{class_name}")
    def component_detail(class_name: str):
        try:
            return describe(class_name).as_dict()
        except NotFoundError as err:
            return _error(404, str(err))

    # -- compositions ------------------------------------------------------

    @app.post("/api/compositions", status_code=201)
    async def create_composition(request: Request, x_user: str = Header("anonymous")):
        body = await request.body()
        comp, findings, problem = _check_body(body)
        if problem is not None:
            return _error(400, problem)
        comp_id = store.new_id()
        store.save_composition(
            comp_id,
            body,
            {"owner": x_user, "shared": False, "title": comp.title},
        )
        return JSONResponse(
            status_code=201,
            content={"id": comp_id, "findings": _findings_payload(findings)},
        )

    @app.get("/api/compositions/{comp_id}")
    def fetch_composition(comp_id: str, x_user: str = Header("anonymous")):
        meta = store.load_composition_meta(comp_id)
        if meta is None:
            return _error(404, "no composition {}".format(comp_id))
        if not meta["shared"] and meta["owner"] != x_user:
            return _error(403, "composition {} is not shared".format(comp_id))
        return Response(
            content=store.load_composition(comp_id), media_type="application/json"
        )

    @app.put("/api/compositions/{comp_id}")
    async def replace_composition(
        comp_id: str, request: Request, x_user: str = Header("anonymous")
    ):
        meta = store.load_composition_meta(comp_id)
        if meta is None:
            return _error(404, "no composition {}".format(comp_id))
        if meta["owner"] != x_user:
            return _error(403, "only the owner can replace a composition")
        body = await request.body()
        comp, findings, problem = _check_body(body)
        if problem is not None:
            return _error(400, problem)
        meta["title"] = comp.title
        store.save_composition(comp_id, body, meta)
        return {"id": comp_id, "findings": _findings_payload(findings)}

    @app.post("/api/compositions/{comp_id}/share")
    def share_composition(comp_id: str, x_user: str = Header("anonymous")):
        meta = store.load_composition_meta(comp_id)
        if meta is None:
            return _error(404, "no composition {}".format(comp_id))
        if meta["owner"] != x_user:
            return _error(403, "only the owner can share a composition")
        meta["shared"] = True
        store.save_composition_meta(comp_id, meta)
        return {"id": comp_id, "shared": True}

    # -- runs ----------------------------------------------------------------

    @app.post("/api/runs", status_code=201)
    async def submit_run(request: Request, x_user: str = Header("anonymous")):
        try:
            payload = json.loads(await request.body())
            comp_id = payload["composition_id"]
        except (ValueError, KeyError, TypeError):
            return _error(400, "body must be JSON with a composition_id")
        body = store.load_composition(comp_id)
        if body is None:
            return _error(404, "no composition {}".format(comp_id))
        comp, findings, problem = _check_body(body)
        if problem is not None:
            return _error(400, problem)
        if findings:
            return JSONResponse(
                status_code=409,
                content={
                    "error": "composition has validation findings",
                    "findings": _findings_payload(findings),
                },
            )
        record = RunRecord(
            run_id=store.new_id(),
            composition_id=comp_id,
            owner=x_user,
            submitted=time.time(),
        )
        store.save_run(record)
        executor.submit(record.run_id)
        return JSONResponse(
            status_code=201, content={"id": record.run_id, "status": record.status}
        )

    @app.get("/api/runs/{run_id}")
    def run_status(run_id: str):
        record = store.load_run(run_id)
        if record is None:
            return _error(404, "no run {}".format(run_id))
        return record.as_dict()

    @app.get("/api/runs/{run_id}/outputs")
    def run_outputs(run_id: str):
        record = store.load_run(run_id)
        if record is None:
            return _error(404, "no run {}".format(run_id))
        return {"outputs": list(record.outputs)}

    @app.get("/api/runs/{run_id}/outputs/{name:path}")
    def run_output_file(run_id: str, name: str):
        record = store.load_run(run_id)
        if record is None:
            return _error(404, "no run {}".format(run_id))
        if name not in record.outputs:
            return _error(404, "run has no output {}".format(name))
        path = os.path.join(store.outputs_dir(run_id), name)
        if not os.path.exists(path):
            return _error(404, "output {} is missing".format(name))
        with open(path, "rb") as stream:
            return Response(content=stream.read(), media_type="text/plain")

    # -- citation ------------------------------------------------------------

    @app.post("/api/citation")
    async def citation(request: Request):
        try:
            doc = json.loads(await request.body())
        except ValueError as err:
            return _error(400, "body is not valid JSON: {}".format(err))
        try:
            return {"citation": format_citation(doc)}
        except MetadataError as err:
            return _error(400, str(err))

    # mounted last so /api/* always wins over client files
    if ui:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui, html=True), name="ui")

    return app


def serve(host="127.0.0.1", port=None, root=None, workers=None, ui=None):
    """Run the HTTP server until interrupted."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("WMT_PORT", DEFAULT_PORT))
    uvicorn.run(
        create_app(root=root, workers=workers, ui=ui), host=host, port=port
    )
