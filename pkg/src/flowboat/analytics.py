"""Flow grouping, Sankey aggregation, metrics, boxplot statistics, detail views.

Everything here is a pure function over immutable sequences, safe to evaluate
in parallel across flows.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .catalog import ConceptCatalog
from .errors import EmptySelectionError, UnknownFlowError, UnknownMetricError
from .models import (
    AOI_CENTER_STACK,
    FilterSpec,
    Flow,
    InteractionSequence,
)

SINK_END = "END"
SINK_ABORT = "ABORT"

METRIC_IDS = (
    "time_on_task_ms",
    "n_interactions",
    "tgd_ms",
    "mgd_ms",
    "n_glances",
    "mean_speed_mps",
)


# -- flows --------------------------------------------------------------------


def flow_id_for(path: Sequence[str], status: str) -> str:
    digest = hashlib.sha1(("\x1f".join(path) + "\x00" + status).encode()).hexdigest()
    return f"flow-{digest[:12]}"


def group_flows(sequences: Iterable[InteractionSequence]) -> list[Flow]:
    """Partition sequences into flows keyed by (element path, coarse status).

    An aborted [S, B] and a completed [S, B] answer different UX questions, so
    completion status is part of flow identity. Flows come back in descending
    count order, ties broken by flow_id.
    """
    groups: dict[tuple[tuple[str, ...], str], list[str]] = {}
    for sequence in sequences:
        groups.setdefault((sequence.path, sequence.coarse_status), []).append(sequence.sequence_id)
    flows = [
        Flow(flow_id=flow_id_for(path, status), path=path, status=status, sequence_ids=tuple(ids))
        for (path, status), ids in groups.items()
    ]
    flows.sort(key=lambda f: (-f.count, f.flow_id))
    return flows


def apply_filter(
    sequences: Iterable[InteractionSequence], spec: FilterSpec | None
) -> list[InteractionSequence]:
    """Keep sequences matching every present criterion; an empty filter passes all."""
    if spec is None:
        return list(sequences)
    return [s for s in sequences if spec.matches(s)]


def top_flows(flows: Sequence[Flow], top_n: int | None) -> list[Flow]:
    """The ``top_n`` most prominent flows by rank; rank-stable in ``top_n``."""
    if top_n is None:
        return list(flows)
    return list(flows[: max(top_n, 0)])


# -- sankey -------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SankeyNode:
    depth: int
    element_id: str
    count: int


@dataclass(frozen=True, slots=True)
class SankeyEdge:
    """Transition from (depth, source) to (depth + 1, target).

    ``target`` is either an element id or one of the END / ABORT sinks.
    """

    depth: int
    source: str
    target: str
    count: int


@dataclass(frozen=True, slots=True)
class SankeyGraph:
    nodes: tuple[SankeyNode, ...]
    edges: tuple[SankeyEdge, ...]
    total_sequences: int


def build_sankey(flows: Sequence[Flow], top_n: int | None = None) -> SankeyGraph:
    """Depth-layered aggregate of the given flows.

    Node identity is (depth, element): the same element at two path positions
    is two nodes, which preserves per-step drop-off visibility. Each path's
    last element emits an edge into the END sink when completed, else into the
    ABORT sink, so inflow equals outflow at every node.
    """
    selected = top_flows(flows, top_n)
    node_counts: dict[tuple[int, str], int] = {}
    edge_counts: dict[tuple[int, str, str], int] = {}
    total = 0
    for flow in selected:
        total += flow.count
        for depth, element_id in enumerate(flow.path):
            node_counts[(depth, element_id)] = node_counts.get((depth, element_id), 0) + flow.count
            if depth + 1 < len(flow.path):
                target = flow.path[depth + 1]
            else:
                target = SINK_END if flow.status == "completed" else SINK_ABORT
            key = (depth, element_id, target)
            edge_counts[key] = edge_counts.get(key, 0) + flow.count
    nodes = tuple(
        SankeyNode(depth=d, element_id=e, count=c) for (d, e), c in sorted(node_counts.items())
    )
    edges = tuple(
        SankeyEdge(depth=d, source=s, target=t, count=c) for (d, s, t), c in sorted(edge_counts.items())
    )
    return SankeyGraph(nodes=nodes, edges=edges, total_sequences=total)


# -- metrics ------------------------------------------------------------------


def compute_metric(
    sequence: InteractionSequence, metric_id: str, aoi: str = AOI_CENTER_STACK
) -> float | None:
    """One metric value for one sequence, or None when undefined.

    Glance metrics use the clipped glances toward ``aoi``; a sequence with no
    glance data at all yields undefined rather than a fabricated zero. Mean
    speed is time-weighted (trapezoidal over the samples), which keeps it
    robust to irregular sampling.
    """
    if metric_id not in METRIC_IDS:
        raise UnknownMetricError(metric_id)
    if metric_id == "time_on_task_ms":
        start, end = sequence.span
        return float(end - start)
    if metric_id == "n_interactions":
        return float(len(sequence.events))
    if not sequence.context_attached:
        raise ValueError(f"metric {metric_id!r} needs attached context (sequence {sequence.sequence_id})")
    if metric_id == "mean_speed_mps":
        return _mean_speed(sequence)
    if not sequence.glances:
        return None
    contributing = [g for g in sequence.glances_clipped if g.aoi == aoi]
    if metric_id == "tgd_ms":
        return float(sum(g.duration_ms for g in contributing))
    if metric_id == "n_glances":
        return float(len(contributing))
    # mgd_ms
    if not contributing:
        return None
    total = sum(g.duration_ms for g in contributing)
    return total / len(contributing)


def defined_metrics(sequence: InteractionSequence, aoi: str = AOI_CENTER_STACK) -> dict[str, float]:
    """Every metric that is defined for this sequence."""
    out: dict[str, float] = {}
    for metric_id in METRIC_IDS:
        value = compute_metric(sequence, metric_id, aoi=aoi)
        if value is not None:
            out[metric_id] = value
    return out


def _mean_speed(sequence: InteractionSequence) -> float | None:
    if not sequence.signals:
        return None
    span_start, span_end = sequence.span
    ts = [s.timestamp_ms for s in sequence.signals]
    vs = [s.speed_mps for s in sequence.signals]
    lo = max(span_start, ts[0])
    hi = min(span_end, ts[-1])
    if hi <= lo:
        # degenerate span or no sample coverage: nearest / interpolated value
        if span_end <= ts[0]:
            return vs[0]
        if span_start >= ts[-1]:
            return vs[-1]
        return _interpolate(ts, vs, span_start)
    integral = 0.0
    for i in range(len(ts) - 1):
        a, b = ts[i], ts[i + 1]
        if b <= lo or a >= hi:
            continue
        seg_lo = max(a, lo)
        seg_hi = min(b, hi)
        va = _lerp(a, b, vs[i], vs[i + 1], seg_lo)
        vb = _lerp(a, b, vs[i], vs[i + 1], seg_hi)
        integral += (va + vb) / 2.0 * (seg_hi - seg_lo)
    return integral / (hi - lo)


def _lerp(t0: int, t1: int, v0: float, v1: float, t: int) -> float:
    if t1 == t0:
        return v0
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0)


def _interpolate(ts: list[int], vs: list[float], t: int) -> float:
    from bisect import bisect_right

    i = bisect_right(ts, t)
    if i == 0:
        return vs[0]
    if i >= len(ts):
        return vs[-1]
    return _lerp(ts[i - 1], ts[i], vs[i - 1], vs[i], t)


# -- boxplot ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class BoxplotStats:
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def boxplot_stats(values: Sequence[float]) -> BoxplotStats:
    """Tukey-hinge boxplot statistics with 1.5 * IQR whiskers.

    Hinges are the medians of the lower and upper halves; when n is odd both
    halves include the median element. Whiskers snap to the most extreme data
    values inside the fences, and everything outside the whiskers is an
    outlier (with IQR 0 that is every value differing from the hinges).
    """
    if not values:
        raise ValueError("boxplot_stats needs at least one value")
    ordered = sorted(float(v) for v in values)
    n = len(ordered)
    median = _median_slice(ordered, 0, n)
    half = (n + 1) // 2
    q1 = _median_slice(ordered, 0, half)
    q3 = _median_slice(ordered, n - half, n)
    iqr = q3 - q1
    low_fence = q1 - 1.5 * iqr
    high_fence = q3 + 1.5 * iqr
    whisker_low = min(v for v in ordered if v >= low_fence)
    whisker_high = max(v for v in ordered if v <= high_fence)
    outliers = tuple(v for v in ordered if v < whisker_low or v > whisker_high)
    return BoxplotStats(
        median=median,
        q1=q1,
        q3=q3,
        whisker_low=whisker_low,
        whisker_high=whisker_high,
        outliers=outliers,
    )


def _median_slice(ordered: list[float], lo: int, hi: int) -> float:
    k = hi - lo
    mid = lo + k // 2
    if k % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0


# -- distributions ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class FlowDistribution:
    """Boxplot stats plus the raw per-sequence points for one flow.

    ``stats`` is absent when no sequence in the flow has a defined value.
    """

    flow_id: str
    path: tuple[str, ...]
    status: str
    points: tuple[tuple[str, float], ...]
    stats: BoxplotStats | None


@dataclass(frozen=True, slots=True)
class MetricDistribution:
    metric_id: str
    flows: tuple[FlowDistribution, ...]


def metric_distribution(
    flows: Sequence[Flow],
    metric_id: str,
    sequences_by_id: Mapping[str, InteractionSequence],
    flow_ids: Sequence[str] | None = None,
    top_n: int | None = None,
    aoi: str = AOI_CENTER_STACK,
) -> MetricDistribution:
    """Per-flow metric distribution over the selected flows.

    Selection keeps the flow rank order; ``flow_ids`` picks explicit flows
    (unknown ids raise), ``top_n`` then caps by rank. Each point pairs one
    sequence with its defined metric value; undefined values are excluded,
    never imputed.
    """
    if metric_id not in METRIC_IDS:
        raise UnknownMetricError(metric_id)
    if flow_ids is not None:
        known = {f.flow_id for f in flows}
        for fid in flow_ids:
            if fid not in known:
                raise UnknownFlowError(fid)
        wanted = set(flow_ids)
        selected = [f for f in flows if f.flow_id in wanted]
    else:
        selected = list(flows)
    selected = top_flows(selected, top_n)
    if not selected:
        raise EmptySelectionError("at least one flow must be selected")
    entries = []
    for flow in selected:
        points: list[tuple[str, float]] = []
        for sequence_id in flow.sequence_ids:
            value = compute_metric(sequences_by_id[sequence_id], metric_id, aoi=aoi)
            if value is not None:
                points.append((sequence_id, value))
        stats = boxplot_stats([v for _, v in points]) if points else None
        entries.append(
            FlowDistribution(
                flow_id=flow.flow_id,
                path=flow.path,
                status=flow.status,
                points=tuple(points),
                stats=stats,
            )
        )
    return MetricDistribution(metric_id=metric_id, flows=tuple(entries))


# -- sequence detail ----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class EventMarker:
    t_ms: int
    element_id: str
    label: str
    action: str
    known: bool


@dataclass(frozen=True, slots=True)
class GlanceSpan:
    aoi: str
    start_ms: int
    end_ms: int


@dataclass(frozen=True, slots=True)
class TracePoint:
    t_ms: int
    value: float


@dataclass(frozen=True, slots=True)
class SequenceDetail:
    """Synchronized timeline detail; every track shares one time axis with
    t = 0 at the first event."""

    sequence_id: str
    task_id: str
    vehicle_id: str
    session_id: str
    software_version: str
    car_model: str
    status: str
    duration_ms: int
    markers: tuple[EventMarker, ...]
    glance_track: tuple[GlanceSpan, ...]
    speed_trace: tuple[TracePoint, ...]
    steering_trace: tuple[TracePoint, ...]
    metrics: dict[str, float]


def sequence_detail(
    sequence: InteractionSequence,
    catalog: ConceptCatalog | None = None,
    aoi: str = AOI_CENTER_STACK,
) -> SequenceDetail:
    """Timeline detail for one sequence with attached context.

    Labels come from the catalog; unknown elements keep their raw id and are
    flagged so the UI can render them distinctly.
    """
    if not sequence.context_attached:
        raise ValueError(f"sequence {sequence.sequence_id} has no attached context")
    t0 = sequence.events[0].timestamp_ms
    markers = []
    for event in sequence.events:
        element = catalog.resolve(event.element_id) if catalog is not None else None
        markers.append(
            EventMarker(
                t_ms=event.timestamp_ms - t0,
                element_id=event.element_id,
                label=element.label if element is not None else event.element_id,
                action=event.action,
                known=element is not None,
            )
        )
    glance_track = tuple(
        GlanceSpan(aoi=g.aoi, start_ms=g.start_ms - t0, end_ms=g.end_ms - t0) for g in sequence.glances
    )
    speed_trace = tuple(
        TracePoint(t_ms=s.timestamp_ms - t0, value=s.speed_mps) for s in sequence.signals
    )
    steering_trace = tuple(
        TracePoint(t_ms=s.timestamp_ms - t0, value=s.steering_angle_deg) for s in sequence.signals
    )
    return SequenceDetail(
        sequence_id=sequence.sequence_id,
        task_id=sequence.task_id,
        vehicle_id=sequence.vehicle_id,
        session_id=sequence.session_id,
        software_version=sequence.software_version,
        car_model=sequence.car_model,
        status=sequence.status,
        duration_ms=sequence.span[1] - t0,
        markers=tuple(markers),
        glance_track=glance_track,
        speed_trace=speed_trace,
        steering_trace=steering_trace,
        metrics=defined_metrics(sequence, aoi=aoi),
    )
