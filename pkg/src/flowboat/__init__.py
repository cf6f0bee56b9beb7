"""Flowboat: interactive analysis of in-vehicle touchscreen user flows.

Ingests vehicle telemetry (touch interactions, driver glances, bus signals),
extracts task-bounded interaction sequences, aggregates them into flows and a
depth-layered Sankey graph, computes interaction / glance / driving metrics,
and serves the three analysis levels (task, flow, sequence) over HTTP.
"""

from .analytics import (
    BoxplotStats,
    MetricDistribution,
    SankeyGraph,
    SequenceDetail,
    apply_filter,
    boxplot_stats,
    build_sankey,
    compute_metric,
    group_flows,
    metric_distribution,
    sequence_detail,
)
from .catalog import ConceptCatalog
from .datagen import GenConfig, Manifest, generate, write_catalog
from .extraction import TaskRegistry, attach_context, extract_sequences, extract_with_context
from .models import (
    ExtractionConfig,
    FilterSpec,
    Flow,
    GlanceEvent,
    InteractionEvent,
    InteractionSequence,
    SignalSample,
    TaskDefinition,
    UiElement,
)
from .store import IngestReport, TelemetryStore

__version__ = "0.1.0"

__all__ = [
    "BoxplotStats",
    "ConceptCatalog",
    "ExtractionConfig",
    "FilterSpec",
    "Flow",
    "GenConfig",
    "GlanceEvent",
    "IngestReport",
    "InteractionEvent",
    "InteractionSequence",
    "Manifest",
    "MetricDistribution",
    "SankeyGraph",
    "SequenceDetail",
    "SignalSample",
    "TaskDefinition",
    "TaskRegistry",
    "TelemetryStore",
    "UiElement",
    "apply_filter",
    "attach_context",
    "boxplot_stats",
    "build_sankey",
    "compute_metric",
    "extract_sequences",
    "extract_with_context",
    "generate",
    "group_flows",
    "metric_distribution",
    "sequence_detail",
    "write_catalog",
]
