"""HTTP service exposing the results database.

Endpoints:
  GET  /api/entities           selectable problems, planners, versions, attributes
  POST /api/upload             raw log file body -> new experiment id
  GET  /api/plot/performance   box / ECDF / success-fraction data
  GET  /api/plot/progress      convergence-over-time data
  GET  /api/plot/regression    per-version bars
and static files at / when a bundle directory is supplied.

Plot endpoints take `format=json|svg`. JSON bytes are canonical (sorted
keys, no whitespace) and SVG rendering is deterministic, so identical
queries return identical bytes across server restarts.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, Response
from fastapi.staticfiles import StaticFiles

from . import benchdb, plots, reports
from .benchlog import LogParseError, parse_log

DEFAULT_UPLOAD_CAP = 64 * 1024 * 1024

_INDEX_FALLBACK = """<!doctype html>
<html><head><title>plannerbench</title></head>
<body>
<h1>plannerbench server</h1>
<p>No UI bundle is configured. The API is available at:</p>
<ul>
<li><code>GET /api/entities</code></li>
<li><code>POST /api/upload</code></li>
<li><code>GET /api/plot/performance?problem=&amp;attribute=&amp;version=&amp;planners=&amp;format=json|svg&amp;ecdf=</code></li>
<li><code>GET /api/plot/progress?problem=&amp;attribute=&amp;version=&amp;planners=&amp;format=&amp;show_points=&amp;smooth_window=&amp;grid_step=</code></li>
<li><code>GET /api/plot/regression?problem=&amp;attribute=&amp;planners=&amp;format=</code></li>
</ul>
</body></html>
"""


def canonical_json(payload) -> bytes:
    """Stable JSON bytes: sorted keys, compact separators, finite numbers only."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error(message: str, status_code: int = 400) -> Response:
    return _json_response({"error": message}, status_code)


def _parse_bool(raw: str | None, name: str) -> bool:
    if raw is None:
        return False
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off", ""):
        return False
    raise ValueError(f"{name} must be true or false; got {raw!r}")


def _parse_planners(raw: str | None) -> list[str] | None:
    if raw is None or raw.strip() == "":
        return None
    return [p.strip() for p in raw.split(",") if p.strip()]


def _plot_response(data: dict, fmt: str) -> Response:
    if fmt == "json":
        return _json_response(data)
    if fmt == "svg":
        return Response(content=plots.render_svg(data), media_type="image/svg+xml")
    raise ValueError(f"format must be json or svg; got {fmt!r}")


def create_app(
    db_path: str | Path,
    static_dir: str | Path | None = None,
    max_upload_bytes: int = DEFAULT_UPLOAD_CAP,
) -> FastAPI:
    """Build the application around one database file.

    Every request opens its own connection, so the app object itself
    holds no state and concurrent reads are safe; SQLite serializes
    writes.
    """
    db_path = Path(db_path)
    app = FastAPI(title="plannerbench", docs_url=None, redoc_url=None)

    def connect():
        return benchdb.open_db(db_path)

    @app.get("/api/entities")
    def entities() -> Response:
        conn = connect()
        try:
            ent = benchdb.list_entities(conn)
        finally:
            conn.close()
        return _json_response(
            {
                "problems": ent.problems,
                "planners": ent.planners,
                "versions": ent.versions,
                "run_attributes": [{"name": n, "type": t} for n, t in ent.run_attributes],
                "progress_attributes": [
                    {"name": n, "type": t} for n, t in ent.progress_attributes
                ],
            }
        )

    @app.post("/api/upload")
    async def upload(request: Request) -> Response:
        declared = request.headers.get("content-length")
        if declared is not None and declared.isdigit() and int(declared) > max_upload_bytes:
            return _error(f"upload exceeds {max_upload_bytes} byte limit", 413)
        body = await request.body()
        if len(body) > max_upload_bytes:
            return _error(f"upload exceeds {max_upload_bytes} byte limit", 413)
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError as exc:
            return _error(f"log file is not valid UTF-8: {exc}", 422)
        try:
            log = parse_log(text)
        except LogParseError as exc:
            return _error(str(exc), 422)
        conn = connect()
        try:
            experiment_id = benchdb.ingest_log(conn, log)
        except ValueError as exc:
            return _error(str(exc), 422)
        finally:
            conn.close()
        return _json_response({"experiment_id": experiment_id})

    @app.get("/api/plot/performance")
    def plot_performance(
        problem: str,
        attribute: str,
        version: str | None = None,
        planners: str | None = None,
        format: str = "json",
        ecdf: str | None = None,
    ) -> Response:
        conn = connect()
        try:
            data = reports.build_performance_plot(
                conn,
                problem,
                attribute,
                version=version,
                planners=_parse_planners(planners),
                use_ecdf=_parse_bool(ecdf, "ecdf"),
            )
            return _plot_response(data, format)
        except ValueError as exc:
            return _error(str(exc))
        finally:
            conn.close()

    @app.get("/api/plot/progress")
    def plot_progress(
        problem: str,
        attribute: str = "best_cost",
        version: str | None = None,
        planners: str | None = None,
        format: str = "json",
        show_points: str | None = None,
        smooth_window: int = 5,
        grid_step: float = 0.1,
    ) -> Response:
        conn = connect()
        try:
            data = reports.build_progress_plot(
                conn,
                problem,
                attribute,
                version=version,
                planners=_parse_planners(planners),
                show_points=_parse_bool(show_points, "show_points"),
                smooth_window=smooth_window,
                grid_step=grid_step,
            )
            return _plot_response(data, format)
        except ValueError as exc:
            return _error(str(exc))
        finally:
            conn.close()

    @app.get("/api/plot/regression")
    def plot_regression(
        problem: str,
        attribute: str,
        planners: str | None = None,
        format: str = "json",
    ) -> Response:
        conn = connect()
        try:
            data = reports.build_regression_plot(
                conn, problem, attribute, planners=_parse_planners(planners)
            )
            return _plot_response(data, format)
        except ValueError as exc:
            return _error(str(exc))
        finally:
            conn.close()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return _INDEX_FALLBACK

    return app


def serve(db_path: str | Path, port: int, host: str = "127.0.0.1",
          static_dir: str | Path | None = None) -> None:
    """Run the app under uvicorn until interrupted."""
    import uvicorn

    uvicorn.run(create_app(db_path, static_dir=static_dir), host=host, port=port)
