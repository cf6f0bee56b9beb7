"""Core telemetry record types and task domain types.

All records are immutable; analytics code treats them as values. Timestamps
are integer epoch milliseconds as logged by the vehicle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ACTIONS = frozenset({"tap", "long_press", "drag", "scroll"})

AOI_ROAD = "road"
AOI_CENTER_STACK = "center_stack"
AOI_OTHER = "other"
AOIS = frozenset({AOI_ROAD, AOI_CENTER_STACK, AOI_OTHER})

STATUS_COMPLETED = "completed"
STATUS_ABORTED_GAP = "aborted_gap"
STATUS_ABORTED_SESSION_END = "aborted_session_end"
STATUS_ABORTED_RESTART = "aborted_restart"
SEQUENCE_STATUSES = frozenset(
    {STATUS_COMPLETED, STATUS_ABORTED_GAP, STATUS_ABORTED_SESSION_END, STATUS_ABORTED_RESTART}
)


@dataclass(frozen=True, slots=True)
class InteractionEvent:
    """One timestamped touchscreen action by one vehicle in one drive session."""

    vehicle_id: str
    session_id: str
    timestamp_ms: int
    element_id: str
    action: str
    software_version: str
    car_model: str


@dataclass(frozen=True, slots=True)
class GlanceEvent:
    """Driver gaze interval toward one area of interest."""

    vehicle_id: str
    session_id: str
    aoi: str
    start_ms: int
    end_ms: int

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True, slots=True)
class SignalSample:
    """One vehicle-bus sample: speed and steering wheel angle."""

    vehicle_id: str
    session_id: str
    timestamp_ms: int
    speed_mps: float
    steering_angle_deg: float


@dataclass(frozen=True, slots=True)
class UiElement:
    """One interactive UI element of the touchscreen software.

    ``leads_to_screen`` is the screen the UI navigates to when the element is
    activated; it drives the click-through recording emulator.
    """

    element_id: str
    label: str
    app: str
    screen_id: str
    function: str
    interactive: bool = True
    leads_to_screen: str | None = None


@dataclass(frozen=True, slots=True)
class TaskDefinition:
    """A user goal bounded by a start UI element and an end UI element."""

    task_id: str
    start_element: str
    end_element: str
    name: str | None = None


@dataclass(frozen=True, slots=True)
class ExtractionConfig:
    """Tuning knobs for sequence extraction.

    ``max_gap_ms`` bounds the pause allowed between two consecutive events of
    one task attempt; a larger gap aborts the attempt. The default of 30 s is
    a generous upper bound for secondary-task pauses while driving.
    """

    max_gap_ms: int = 30_000
    include_aborted: bool = True
    glance_aoi_for_metrics: str = AOI_CENTER_STACK

    def __post_init__(self) -> None:
        if self.max_gap_ms <= 0:
            raise ValueError("max_gap_ms must be positive")
        if self.glance_aoi_for_metrics not in AOIS:
            raise ValueError(f"unknown AOI: {self.glance_aoi_for_metrics!r}")


@dataclass(frozen=True, slots=True)
class InteractionSequence:
    """One extracted task attempt with its attached driving context.

    ``glances`` holds the session glances overlapping the event span unclipped
    (for display); ``glances_clipped`` holds copies clipped to the span (for
    metrics). ``signals`` covers the span padded by 5 s on both sides.
    """

    sequence_id: str
    task_id: str
    vehicle_id: str
    session_id: str
    software_version: str
    car_model: str
    events: tuple[InteractionEvent, ...]
    status: str
    glances: tuple[GlanceEvent, ...] = ()
    glances_clipped: tuple[GlanceEvent, ...] = ()
    signals: tuple[SignalSample, ...] = ()
    context_attached: bool = False

    @property
    def path(self) -> tuple[str, ...]:
        return tuple(e.element_id for e in self.events)

    @property
    def span(self) -> tuple[int, int]:
        """Inclusive [first event, last event] timestamp span."""
        return (self.events[0].timestamp_ms, self.events[-1].timestamp_ms)

    @property
    def completed(self) -> bool:
        return self.status == STATUS_COMPLETED

    @property
    def coarse_status(self) -> str:
        """Collapse the abort variants: ``completed`` or ``aborted``."""
        return STATUS_COMPLETED if self.completed else "aborted"


@dataclass(frozen=True, slots=True)
class FilterSpec:
    """Conjunction of optional sequence filters; absent criteria pass everything.

    ``statuses`` filters on the coarse status (``completed`` / ``aborted``).
    ``time_range`` keeps sequences whose first event falls inside the closed
    interval. ``top_n_flows`` is flow-rank dependent and is applied later, by
    the Sankey builder and distribution assembly, never here.
    """

    software_versions: frozenset[str] | None = None
    car_models: frozenset[str] | None = None
    statuses: frozenset[str] | None = None
    time_range: tuple[int, int] | None = None
    top_n_flows: int | None = None

    def __post_init__(self) -> None:
        if self.top_n_flows is not None and self.top_n_flows < 1:
            raise ValueError("top_n_flows must be >= 1")

    def matches(self, sequence: InteractionSequence) -> bool:
        if self.software_versions is not None and sequence.software_version not in self.software_versions:
            return False
        if self.car_models is not None and sequence.car_model not in self.car_models:
            return False
        if self.statuses is not None and sequence.coarse_status not in self.statuses:
            return False
        if self.time_range is not None:
            start = sequence.events[0].timestamp_ms
            if not (self.time_range[0] <= start <= self.time_range[1]):
                return False
        return True


@dataclass(frozen=True, slots=True)
class Flow:
    """Equivalence class of sequences sharing one (element path, status) pair."""

    flow_id: str
    path: tuple[str, ...]
    status: str
    sequence_ids: tuple[str, ...]

    @property
    def count(self) -> int:
        return len(self.sequence_ids)
