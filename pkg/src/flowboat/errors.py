"""Exception hierarchy shared by all flowboat modules.

Every error carries a short machine-readable ``code`` so the HTTP layer can
map failures onto structured error bodies without string matching.
"""

from __future__ import annotations


class FlowboatError(Exception):
    """Base class for all flowboat errors."""

    code = "internal"

    def __init__(self, message: str, detail: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.detail = detail


class CatalogError(FlowboatError):
    """Catalog file is invalid (duplicate ids, dangling screen references)."""

    code = "invalid_catalog"


class UnknownElementError(FlowboatError):
    code = "unknown_element"

    def __init__(self, element_id: str) -> None:
        super().__init__(f"unknown element: {element_id!r}", detail=element_id)
        self.element_id = element_id


class TaskDefinitionError(FlowboatError):
    """Task bounds violate a constraint (start == end, non-interactive, ...)."""

    def __init__(self, code: str, message: str, detail: str | None = None) -> None:
        super().__init__(message, detail=detail)
        self.code = code


class UnknownSnapshotError(FlowboatError):
    code = "unknown_snapshot"

    def __init__(self, snapshot_id: int) -> None:
        super().__init__(f"unknown snapshot: {snapshot_id}", detail=str(snapshot_id))
        self.snapshot_id = snapshot_id


class UnknownTaskError(FlowboatError):
    code = "unknown_task"

    def __init__(self, task_id: str) -> None:
        super().__init__(f"unknown task: {task_id!r}", detail=task_id)
        self.task_id = task_id


class UnknownFlowError(FlowboatError):
    code = "unknown_flow"

    def __init__(self, flow_id: str) -> None:
        super().__init__(f"unknown flow: {flow_id!r}", detail=flow_id)
        self.flow_id = flow_id


class UnknownSequenceError(FlowboatError):
    code = "unknown_sequence"

    def __init__(self, sequence_id: str) -> None:
        super().__init__(f"unknown sequence: {sequence_id!r}", detail=sequence_id)
        self.sequence_id = sequence_id


class UnknownMetricError(FlowboatError):
    code = "unknown_metric"

    def __init__(self, metric_id: str) -> None:
        super().__init__(f"unknown metric: {metric_id!r}", detail=metric_id)
        self.metric_id = metric_id


class EmptySelectionError(FlowboatError):
    """An analysis was requested over an empty flow selection."""

    code = "empty_selection"


class StoreError(FlowboatError):
    """Store cannot be opened or a segment file is unreadable/corrupt."""

    code = "store_error"


class GenConfigError(FlowboatError):
    """Synthetic-data generator configuration is invalid."""

    code = "invalid_config"
