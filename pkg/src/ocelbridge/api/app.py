"""HTTP face of the toolkit, versioned under /api/v1.

A thin adapter: every handler delegates to the pipeline/engine and
serializes through the shared payloads module, so responses are equal to
the CLI's --json output by construction.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .. import __version__, pipeline
from ..errors import NotFound, OcelBridgeError, ParamError
from ..iotschema.mapping import ColumnMapping
from ..ocel.stats import directly_follows, log_statistics
from ..payloads import (
    HTTP_STATUS,
    dfg_payload,
    error_payload,
    job_payload,
    stats_payload,
)
from ..workspace.workspace import (
    init_workspace,
    load_ledger,
    open_workspace,
    stage_upload,
)


def _field(body: dict, name: str):
    if not isinstance(body, dict) or name not in body or body[name] is None:
        raise ParamError(f"missing required field: {name}", field_path=name)
    return body[name]


def create_app(root, static_dir=None) -> FastAPI:
    root = Path(root)
    app = FastAPI(title="ocelbridge", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_credentials=False,
        allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(OcelBridgeError)
    async def _engine_error(_request: Request, exc: OcelBridgeError):
        status = HTTP_STATUS.get(exc.code, 422)
        return JSONResponse(status_code=status, content=error_payload(exc))

    def ws():
        return open_workspace(root)

    @app.get("/api/v1/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/v1/workspace")
    async def workspace_init():
        workspace = init_workspace(root)
        return {"root": str(workspace.root)}

    @app.get("/api/v1/workspace")
    async def workspace_info():
        workspace = ws()
        return {
            "root": str(workspace.root),
            "store_attached": pipeline.store_path(workspace).is_file(),
        }

    @app.post("/api/v1/uploads")
    async def upload(request: Request, name: str = Query(default="upload")):
        data = await request.body()
        path, sha = stage_upload(ws(), data, name)
        return {"sha256": sha, "size": len(data), "name": path.name}

    @app.post("/api/v1/ocel/attach")
    async def ocel_attach(request: Request):
        body = await request.json()
        workspace = ws()
        from ..workspace.workspace import read_upload

        data = read_upload(workspace, _field(body, "upload"))
        return pipeline.attach_ocel(workspace, data, name="store.sqlite")

    @app.get("/api/v1/ocel/stats")
    async def ocel_stats():
        log = pipeline.current_log(ws())
        return stats_payload(log_statistics(log))

    @app.get("/api/v1/ocel/dfg")
    async def ocel_dfg(object_type: str = Query(...)):
        log = pipeline.current_log(ws())
        return dfg_payload(object_type, directly_follows(log, object_type))

    @app.get("/api/v1/ocel/download")
    async def ocel_download():
        workspace = ws()
        path = pipeline.store_path(workspace)
        log = pipeline.current_log(workspace)  # 404 when nothing attached
        del log
        data = path.read_bytes()
        sha = hashlib.sha256(data).hexdigest()
        return Response(
            content=data, media_type="application/octet-stream",
            headers={
                "X-Content-SHA256": sha,
                "Content-Disposition": 'attachment; filename="store.sqlite"',
            })

    @app.post("/api/v1/iot/infer")
    async def iot_infer(request: Request):
        body = await request.json()
        return pipeline.infer_for_upload(ws(), _field(body, "upload"))

    @app.post("/api/v1/iot/ingest")
    async def iot_ingest(request: Request):
        body = await request.json()
        workspace = ws()
        from ..workspace.workspace import read_upload

        sha = _field(body, "upload")
        data = read_upload(workspace, sha)
        mapping = None
        if body.get("mapping") is not None:
            mapping = ColumnMapping.from_dict(body["mapping"])
        result = pipeline.ingest_readings(
            workspace, data, body.get("name", "upload.csv"), mapping)
        return pipeline.ingest_payload(result)

    @app.get("/api/v1/iot/summary")
    async def iot_summary():
        return pipeline.summary_payload_for(ws())

    @app.post("/api/v1/integrations/plan")
    async def integrations_plan(request: Request):
        body = await request.json()
        return pipeline.plan_integration(ws(), _field(body, "spec"))

    @app.get("/api/v1/integrations/plans/{plan_id}")
    async def integrations_get_plan(plan_id: str):
        return pipeline.get_plan(ws(), plan_id)

    @app.post("/api/v1/integrations/plans/{plan_id}/execute")
    async def integrations_execute(plan_id: str):
        return pipeline.run_integration(ws(), plan_id)

    @app.get("/api/v1/jobs")
    async def jobs():
        return {"jobs": [job_payload(r) for r in load_ledger(ws())]}

    @app.get("/api/v1/jobs/{job_id}")
    async def job(job_id: str):
        for record in load_ledger(ws()):
            if record.job_id == job_id:
                return job_payload(record)
        raise NotFound(f"unknown job: {job_id}")

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
