"""HTTP interface over ingestion, catalog, tasks, and the three analysis levels.

Response bodies use the same structured-object conventions as the log-file
lines. Every non-success response carries exactly one error object
``{"code", "message", "detail"}`` where ``code`` is one of bad_request,
not_found, conflict, internal, and ``detail`` is a machine-readable token
such as ``start_equals_end`` or ``unknown_element:ghost.btn``.

Analysis endpoints are read-only and default to the latest published
snapshot; the snapshot id actually used is echoed in every analysis response
so the UI can pin it and reproduce results byte for byte.
"""

from __future__ import annotations

import os
from collections import OrderedDict
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import analytics
from .analytics import (
    BoxplotStats,
    MetricDistribution,
    SankeyGraph,
    SequenceDetail,
)
from .catalog import ConceptCatalog, element_to_obj
from .errors import (
    CatalogError,
    EmptySelectionError,
    FlowboatError,
    GenConfigError,
    StoreError,
    TaskDefinitionError,
    UnknownElementError,
    UnknownFlowError,
    UnknownMetricError,
    UnknownSequenceError,
    UnknownSnapshotError,
    UnknownTaskError,
)
from .extraction import TaskRegistry, extract_with_context
from .models import ExtractionConfig, FilterSpec, Flow, InteractionSequence, TaskDefinition
from .store import RECORD_KINDS, IngestReport, TelemetryStore

DATA_DIR_ENV = "FLOWBOAT_DATA_DIR"
_CACHE_LIMIT = 32

_BAD_REQUEST = (400, "bad_request")
_NOT_FOUND = (404, "not_found")
_ERROR_MAP: dict[type, tuple[int, str]] = {
    TaskDefinitionError: _BAD_REQUEST,
    UnknownElementError: _BAD_REQUEST,
    UnknownMetricError: _BAD_REQUEST,
    EmptySelectionError: _BAD_REQUEST,
    GenConfigError: _BAD_REQUEST,
    StoreError: _BAD_REQUEST,
    CatalogError: _BAD_REQUEST,
    UnknownTaskError: _NOT_FOUND,
    UnknownFlowError: _NOT_FOUND,
    UnknownSequenceError: _NOT_FOUND,
    UnknownSnapshotError: _NOT_FOUND,
}


class TaskBody(BaseModel):
    start_element: str
    end_element: str
    name: str | None = None


class IngestBody(BaseModel):
    kind: str
    path: str | None = None
    lines: str | None = None


class AppState:
    """Store, catalog, tasks, and the per-(task, snapshot) extraction cache."""

    def __init__(self, data_dir: str | Path | None, catalog_path: str | Path | None) -> None:
        self.store = TelemetryStore(data_dir)
        self.catalog = ConceptCatalog()
        if catalog_path is not None:
            self.catalog.load_file(catalog_path)
        tasks_path = Path(data_dir) / "tasks.jsonl" if data_dir is not None else None
        self.tasks = TaskRegistry(self.catalog, tasks_path)
        self.extraction_config = ExtractionConfig()
        self._cache: OrderedDict[tuple[str, int], dict[str, Any]] = OrderedDict()
        self._detail_index: dict[str, InteractionSequence] = {}
        if self.store.latest_snapshot_id() is None:
            self.store.publish_snapshot()

    def resolve_snapshot(self, pinned: int | None) -> int:
        if pinned is not None:
            self.store.snapshot_info(pinned)  # raises for unknown ids
            return pinned
        latest = self.store.latest_snapshot_id()
        assert latest is not None  # one snapshot always exists after startup
        return latest

    def sequences_for(self, task: TaskDefinition, snapshot_id: int) -> dict[str, Any]:
        key = (task.task_id, snapshot_id)
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        sequences = extract_with_context(task, self.store, snapshot_id, self.extraction_config)
        entry = {"sequences": sequences, "by_id": {s.sequence_id: s for s in sequences}}
        self._cache[key] = entry
        self._detail_index.update(entry["by_id"])
        while len(self._cache) > _CACHE_LIMIT:
            _, evicted = self._cache.popitem(last=False)
            for sequence_id in evicted["by_id"]:
                self._detail_index.pop(sequence_id, None)
        return entry

    def find_sequence(self, sequence_id: str) -> InteractionSequence:
        try:
            return self._detail_index[sequence_id]
        except KeyError:
            raise UnknownSequenceError(sequence_id) from None


def _filter_from_query(
    software_version: list[str] | None,
    car_model: list[str] | None,
    status: list[str] | None,
    from_ms: int | None,
    to_ms: int | None,
    top_n: int | None,
) -> FilterSpec:
    time_range = None
    if from_ms is not None or to_ms is not None:
        time_range = (from_ms if from_ms is not None else 0, to_ms if to_ms is not None else 2**62)
    try:
        return FilterSpec(
            software_versions=frozenset(software_version) if software_version else None,
            car_models=frozenset(car_model) if car_model else None,
            statuses=frozenset(status) if status else None,
            time_range=time_range,
            top_n_flows=top_n,
        )
    except ValueError as exc:
        raise TaskDefinitionError("bad_filter", str(exc)) from exc


def _task_obj(task: TaskDefinition) -> dict:
    return {
        "task_id": task.task_id,
        "start_element": task.start_element,
        "end_element": task.end_element,
        "name": task.name,
    }


def _report_obj(report: IngestReport) -> dict:
    return {
        "kind": report.kind,
        "accepted": report.accepted,
        "rejected": report.rejected,
        "reject_reasons": [
            {"line": r.line_no, "reason": r.reason, "detail": r.detail} for r in report.reject_reasons
        ],
    }


def _flow_obj(flow: Flow) -> dict:
    return {"flow_id": flow.flow_id, "path": list(flow.path), "status": flow.status, "count": flow.count}


def _sankey_obj(graph: SankeyGraph) -> dict:
    return {
        "total_sequences": graph.total_sequences,
        "nodes": [{"depth": n.depth, "element_id": n.element_id, "count": n.count} for n in graph.nodes],
        "edges": [
            {"depth": e.depth, "source": e.source, "target": e.target, "count": e.count} for e in graph.edges
        ],
    }


def _stats_obj(stats: BoxplotStats | None) -> dict | None:
    if stats is None:
        return None
    return {
        "median": stats.median,
        "q1": stats.q1,
        "q3": stats.q3,
        "whisker_low": stats.whisker_low,
        "whisker_high": stats.whisker_high,
        "outliers": list(stats.outliers),
    }


def _distribution_obj(dist: MetricDistribution) -> dict:
    return {
        "metric_id": dist.metric_id,
        "flows": [
            {
                "flow_id": f.flow_id,
                "path": list(f.path),
                "status": f.status,
                "points": [{"sequence_id": sid, "value": value} for sid, value in f.points],
                "stats": _stats_obj(f.stats),
            }
            for f in dist.flows
        ],
    }


def _detail_obj(detail: SequenceDetail) -> dict:
    return {
        "sequence_id": detail.sequence_id,
        "task_id": detail.task_id,
        "vehicle_id": detail.vehicle_id,
        "session_id": detail.session_id,
        "software_version": detail.software_version,
        "car_model": detail.car_model,
        "status": detail.status,
        "duration_ms": detail.duration_ms,
        "markers": [
            {"t_ms": m.t_ms, "element_id": m.element_id, "label": m.label, "action": m.action, "known": m.known}
            for m in detail.markers
        ],
        "glance_track": [
            {"aoi": g.aoi, "start_ms": g.start_ms, "end_ms": g.end_ms} for g in detail.glance_track
        ],
        "speed_trace": [{"t_ms": p.t_ms, "value": p.value} for p in detail.speed_trace],
        "steering_trace": [{"t_ms": p.t_ms, "value": p.value} for p in detail.steering_trace],
        "metrics": detail.metrics,
    }


def create_app(
    data_dir: str | Path | None = None,
    catalog_path: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the HTTP app; ``data_dir`` falls back to $FLOWBOAT_DATA_DIR.

    With ``ui_dir`` set, the built web UI is served from "/" alongside the
    API. No auth and open CORS: the tool is a single-analyst desk service.
    """
    if data_dir is None:
        env_dir = os.environ.get(DATA_DIR_ENV)
        data_dir = env_dir if env_dir else None
    state = AppState(data_dir, catalog_path)
    app = FastAPI(title="flowboat", docs_url=None, redoc_url=None)
    app.state.flowboat = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(FlowboatError)
    async def _domain_error(_request: Request, exc: FlowboatError) -> JSONResponse:
        status, code = _ERROR_MAP.get(type(exc), (500, "internal"))
        return JSONResponse(
            status_code=status,
            content={"code": code, "message": exc.message, "detail": _error_detail(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "bad_request", "message": "invalid request", "detail": str(exc.errors()[:1])},
        )

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    # -- ingestion / snapshots ------------------------------------------------

    @app.post("/api/ingest")
    def ingest(body: IngestBody) -> dict:
        if body.kind not in RECORD_KINDS:
            raise StoreError(f"unknown record kind: {body.kind!r}")
        if (body.path is None) == (body.lines is None):
            raise StoreError("exactly one of 'path' or 'lines' is required")
        if body.path is not None:
            report = state.store.ingest_file(body.path, body.kind)
        else:
            report = state.store.ingest_lines(body.lines.splitlines(), body.kind)
        return _report_obj(report)

    @app.post("/api/snapshots", status_code=201)
    def publish_snapshot() -> dict:
        snapshot_id = state.store.publish_snapshot()
        info = state.store.snapshot_info(snapshot_id)
        return {"snapshot_id": snapshot_id, "counts": info.counts}

    @app.get("/api/snapshots/latest")
    def latest_snapshot() -> dict:
        snapshot_id = state.resolve_snapshot(None)
        info = state.store.snapshot_info(snapshot_id)
        return {"snapshot_id": snapshot_id, "counts": info.counts}

    # -- concepts ---------------------------------------------------------------

    @app.get("/api/concepts/search")
    def search_concepts(q: str = "", limit: int = 20) -> dict:
        results = state.catalog.search(q, limit=limit)
        return {"query": q, "results": [element_to_obj(e) | _leads_null(e) for e in results]}

    @app.get("/api/concepts/screens")
    def screens() -> dict:
        screen_list = state.catalog.screens()
        home = "home" if any(s.screen_id == "home" for s in screen_list) else (
            screen_list[0].screen_id if screen_list else None
        )
        return {
            "home_screen_id": home,
            "screens": [
                {
                    "screen_id": s.screen_id,
                    "elements": [element_to_obj(e) | _leads_null(e) for e in s.elements],
                }
                for s in screen_list
            ],
        }

    @app.get("/api/concepts/coverage")
    def coverage(snapshot: int | None = None) -> dict:
        snapshot_id = state.resolve_snapshot(snapshot)
        report = state.catalog.coverage_report(state.store.element_ids(snapshot_id))
        return {
            "snapshot_id": snapshot_id,
            "total_distinct": report.total_distinct,
            "resolved": report.resolved,
            "unknown": list(report.unknown),
        }

    # -- tasks ------------------------------------------------------------------

    @app.post("/api/tasks", status_code=201)
    def create_task(body: TaskBody) -> dict:
        task = state.tasks.define_manual(body.start_element, body.end_element, body.name)
        return _task_obj(task)

    @app.post("/api/tasks/recording", status_code=201)
    async def create_task_from_recording(request: Request) -> dict:
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("file")
            if upload is None:
                raise TaskDefinitionError("missing_file", "multipart upload needs a 'file' field")
            text = (await upload.read()).decode("utf-8")
        else:
            text = (await request.body()).decode("utf-8")
        task = state.tasks.define_from_recording(text)
        return _task_obj(task)

    @app.get("/api/tasks")
    def list_tasks() -> dict:
        return {"tasks": [_task_obj(t) for t in state.tasks.list()]}

    @app.get("/api/tasks/{task_id}")
    def get_task(task_id: str) -> dict:
        return _task_obj(state.tasks.get(task_id))

    # -- analysis ---------------------------------------------------------------

    def _filtered_flows(
        task_id: str,
        snapshot: int | None,
        software_version: list[str] | None,
        car_model: list[str] | None,
        status: list[str] | None,
        from_ms: int | None,
        to_ms: int | None,
        top_n: int | None,
    ) -> tuple[TaskDefinition, int, FilterSpec, list[Flow], dict[str, InteractionSequence]]:
        task = state.tasks.get(task_id)
        snapshot_id = state.resolve_snapshot(snapshot)
        spec = _filter_from_query(software_version, car_model, status, from_ms, to_ms, top_n)
        entry = state.sequences_for(task, snapshot_id)
        kept = analytics.apply_filter(entry["sequences"], spec)
        flows = analytics.group_flows(kept)
        return task, snapshot_id, spec, flows, entry["by_id"]

    @app.get("/api/tasks/{task_id}/flows")
    def task_flows(
        task_id: str,
        snapshot: int | None = None,
        software_version: list[str] | None = Query(None),
        car_model: list[str] | None = Query(None),
        status: list[str] | None = Query(None),
        from_ms: int | None = None,
        to_ms: int | None = None,
        top_n: int | None = None,
    ) -> dict:
        _, snapshot_id, spec, flows, _ = _filtered_flows(
            task_id, snapshot, software_version, car_model, status, from_ms, to_ms, top_n
        )
        flows = analytics.top_flows(flows, spec.top_n_flows)
        return {
            "task_id": task_id,
            "snapshot_id": snapshot_id,
            "total_sequences": sum(f.count for f in flows),
            "flows": [_flow_obj(f) for f in flows],
        }

    @app.get("/api/tasks/{task_id}/sankey")
    def task_sankey(
        task_id: str,
        snapshot: int | None = None,
        software_version: list[str] | None = Query(None),
        car_model: list[str] | None = Query(None),
        status: list[str] | None = Query(None),
        from_ms: int | None = None,
        to_ms: int | None = None,
        top_n: int | None = None,
    ) -> dict:
        _, snapshot_id, spec, flows, _ = _filtered_flows(
            task_id, snapshot, software_version, car_model, status, from_ms, to_ms, top_n
        )
        graph = analytics.build_sankey(flows, spec.top_n_flows)
        return {"task_id": task_id, "snapshot_id": snapshot_id} | _sankey_obj(graph)

    @app.get("/api/tasks/{task_id}/distribution")
    def task_distribution(
        task_id: str,
        metric: str,
        flows: list[str] | None = Query(None),
        snapshot: int | None = None,
        software_version: list[str] | None = Query(None),
        car_model: list[str] | None = Query(None),
        status: list[str] | None = Query(None),
        from_ms: int | None = None,
        to_ms: int | None = None,
        top_n: int | None = None,
    ) -> dict:
        _, snapshot_id, spec, all_flows, by_id = _filtered_flows(
            task_id, snapshot, software_version, car_model, status, from_ms, to_ms, top_n
        )
        dist = analytics.metric_distribution(
            all_flows,
            metric,
            by_id,
            flow_ids=flows,
            top_n=spec.top_n_flows,
            aoi=state.extraction_config.glance_aoi_for_metrics,
        )
        return {"task_id": task_id, "snapshot_id": snapshot_id} | _distribution_obj(dist)

    @app.get("/api/sequences/{sequence_id}")
    def get_sequence_detail(sequence_id: str) -> dict:
        sequence = state.find_sequence(sequence_id)
        detail = analytics.sequence_detail(
            sequence, state.catalog, aoi=state.extraction_config.glance_aoi_for_metrics
        )
        return _detail_obj(detail)

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _leads_null(element) -> dict:
    # search/screens responses always carry the key, null when absent
    return {"leads_to_screen": element.leads_to_screen}


def _error_detail(exc: FlowboatError) -> str:
    if isinstance(exc, UnknownElementError):
        return f"unknown_element:{exc.element_id}"
    if isinstance(exc, UnknownTaskError):
        return f"unknown_task:{exc.task_id}"
    if isinstance(exc, UnknownFlowError):
        return f"unknown_flow:{exc.flow_id}"
    if isinstance(exc, UnknownSequenceError):
        return f"unknown_sequence:{exc.sequence_id}"
    if isinstance(exc, UnknownSnapshotError):
        return f"unknown_snapshot:{exc.snapshot_id}"
    if isinstance(exc, UnknownMetricError):
        return f"unknown_metric:{exc.metric_id}"
    if isinstance(exc, TaskDefinitionError):
        return exc.code
    return exc.detail if exc.detail is not None else exc.code
