import logging
import os
import time
from decimal import Decimal
from typing import Iterable, Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from xwebbench import __version__
from xwebbench.drivers.reference import ReferenceDriver
from xwebbench.engine.results import QueryResult
from xwebbench.errors import DriverError
from xwebbench.utils.settings import ENV_PREFIX, parse_bool
from xwebbench.workload.queries import query_by_id

logger = logging.getLogger(__name__)


def perturb(result: QueryResult, width: int) -> QueryResult:
    """Copy of result whose first aggregate of the first row is off by one; width is the group key count."""
    if not result.rows:
        return QueryResult(columns=result.columns, rows=[tuple("0" for _ in result.columns)])
    first = list(result.rows[0])
    first[width] = Decimal(str(first[width])) + 1
    return QueryResult(columns=result.columns, rows=[tuple(first)] + list(result.rows[1:]))


def create_app(latency: float = 0.0, faulty: Iterable[str] = (), comparable: bool = True) -> FastAPI:
    """
    Build an XML database stand-in that stores uploaded warehouse documents
    and answers workload queries with the reference evaluator.

    Args:
        latency: Seconds added to every query answer
        faulty: Query ids whose answer is deliberately wrong
        comparable: Answer with JSON rows; otherwise with an opaque CSV body
    """
    app = FastAPI(
        title="XWeB reference backend",
        description="Stores warehouse documents and answers XWeB workload queries",
        version=__version__,
    )
    app.state.backend = ReferenceDriver()
    app.state.latency = latency
    app.state.faulty = frozenset(faulty)
    app.state.comparable = comparable

    @app.put("/documents/{name}")
    async def load_document(name: str, request: Request):
        """Store one document; the body is the raw XML or a multipart upload."""
        if request.headers.get("content-type", "").startswith("multipart/"):
            form = await request.form()
            upload = next((v for v in form.values() if hasattr(v, "read")), None)
            if upload is None:
                raise HTTPException(status_code=400, detail="multipart body carries no file")
            data = await upload.read()
        else:
            data = await request.body()
        try:
            app.state.backend.load_document(name, data)
        except DriverError as e:
            raise HTTPException(status_code=400, detail=str(e))
        logger.info("stored %s (%d bytes)", name, len(data))
        return {"name": name, "size": len(data)}

    @app.post("/queries/{query_id}")
    def run_query(query_id: str):
        try:
            q = query_by_id(query_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown query {query_id}")
        try:
            result = app.state.backend.execute_query(q, "").result
        except DriverError as e:
            raise HTTPException(status_code=409, detail=str(e))
        if app.state.latency:
            time.sleep(app.state.latency)
        if query_id in app.state.faulty:
            result = perturb(result, len(q.group_by))
        if app.state.comparable:
            return JSONResponse(result.to_payload())
        return PlainTextResponse(result.to_csv(), media_type="text/csv")

    @app.post("/reset")
    def reset():
        app.state.backend.reset()
        return {"status": "empty"}

    @app.get("/health")
    def health_check():
        return {"status": "healthy", "warehouse_loaded": app.state.backend.warehouse is not None}

    @app.get("/")
    def root():
        return {
            "name": "XWeB reference backend",
            "version": __version__,
            "endpoints": {
                "load": "PUT /documents/{name} - store a warehouse document",
                "query": "POST /queries/{query_id} - answer a workload query (Q01..Q20)",
                "reset": "POST /reset - drop stored documents",
                "health": "GET /health - health check",
            },
        }

    return app


def app_from_environment(environ: Optional[dict] = None) -> FastAPI:
    """
    App configured by XWEB_MOCK_LATENCY (seconds), XWEB_MOCK_FAULTS
    (comma-separated query ids) and XWEB_MOCK_COMPARABLE (true/false).
    """
    environ = os.environ if environ is None else environ
    faults = environ.get(ENV_PREFIX + "MOCK_FAULTS", "")
    return create_app(
        latency=float(environ.get(ENV_PREFIX + "MOCK_LATENCY", "0")),
        faulty=[f.strip() for f in faults.split(",") if f.strip()],
        comparable=parse_bool(environ.get(ENV_PREFIX + "MOCK_COMPARABLE", "true")),
    )


app = app_from_environment()


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        app,
        host="127.0.0.1",
        port=8000,
        log_level="info"
    )
