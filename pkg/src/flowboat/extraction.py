"""Task definitions and extraction of task-bounded interaction sequences.

A task is bounded by a start and an end UI element. Extraction walks each
session's events once, in timestamp order, and applies these rules:

- an occurrence of the start element opens a candidate when none is open;
- while a candidate is open, each event arriving within ``max_gap_ms`` of the
  previous one is appended; reaching the end element completes the candidate;
- a start element while open closes the candidate as ``aborted_restart`` and
  immediately opens a new one at that event;
- a gap larger than ``max_gap_ms`` closes the candidate as ``aborted_gap``
  (the breaching event opens a new candidate only if it is the start element);
- session end closes an open candidate as ``aborted_session_end``.

An end element with no open candidate is ignored; the scan never searches
backward. Without the gap rule, a morning tap and an evening tap in the same
drive would merge into one attempt.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Sequence

from .catalog import ConceptCatalog
from .errors import TaskDefinitionError, UnknownElementError, UnknownTaskError
from .models import (
    STATUS_ABORTED_GAP,
    STATUS_ABORTED_RESTART,
    STATUS_ABORTED_SESSION_END,
    STATUS_COMPLETED,
    ExtractionConfig,
    GlanceEvent,
    InteractionEvent,
    InteractionSequence,
    SignalSample,
    TaskDefinition,
)
from .store import TelemetryStore

SIGNAL_PADDING_MS = 5_000


def validate_task_bounds(catalog: ConceptCatalog, start_element: str, end_element: str) -> None:
    """Raise unless both bounds resolve, are interactive, and differ."""
    for element_id in (start_element, end_element):
        element = catalog.resolve(element_id)
        if element is None:
            raise UnknownElementError(element_id)
        if not element.interactive:
            raise TaskDefinitionError(
                "element_not_interactive",
                f"element {element_id!r} is not interactive",
                detail=element_id,
            )
    if start_element == end_element:
        raise TaskDefinitionError(
            "start_equals_end",
            "start and end element must differ",
            detail=start_element,
        )


def parse_recording(text: str) -> list[str]:
    """Element identifiers from a recording file: one id per line, in click order."""
    return [line.strip() for line in text.splitlines() if line.strip()]


class TaskRegistry:
    """Creates and stores task definitions, optionally persisted as JSONL."""

    def __init__(self, catalog: ConceptCatalog, path: str | Path | None = None) -> None:
        self._catalog = catalog
        self._path = Path(path) if path is not None else None
        self._tasks: dict[str, TaskDefinition] = {}
        self._next_id = 1
        self._lock = threading.Lock()
        if self._path is not None and self._path.exists():
            for line in self._path.read_text(encoding="utf-8").splitlines():
                obj = json.loads(line)
                task = TaskDefinition(
                    task_id=obj["task_id"],
                    start_element=obj["start_element"],
                    end_element=obj["end_element"],
                    name=obj.get("name"),
                )
                self._tasks[task.task_id] = task
                suffix = task.task_id.rsplit("-", 1)[-1]
                if suffix.isdigit():
                    self._next_id = max(self._next_id, int(suffix) + 1)

    def define_manual(self, start_element: str, end_element: str, name: str | None = None) -> TaskDefinition:
        validate_task_bounds(self._catalog, start_element, end_element)
        return self._persist(start_element, end_element, name)

    def define_from_recording(self, text: str, name: str | None = None) -> TaskDefinition:
        """Task bounded by the first and last interaction of a recorded sequence."""
        identifiers = parse_recording(text)
        if len(identifiers) < 2:
            raise TaskDefinitionError(
                "too_short",
                f"recording must contain at least 2 identifiers, got {len(identifiers)}",
            )
        for element_id in identifiers:
            if self._catalog.resolve(element_id) is None:
                raise UnknownElementError(element_id)
        validate_task_bounds(self._catalog, identifiers[0], identifiers[-1])
        return self._persist(identifiers[0], identifiers[-1], name)

    def _persist(self, start_element: str, end_element: str, name: str | None) -> TaskDefinition:
        with self._lock:
            task = TaskDefinition(
                task_id=f"task-{self._next_id:04d}",
                start_element=start_element,
                end_element=end_element,
                name=name,
            )
            self._next_id += 1
            self._tasks[task.task_id] = task
            if self._path is not None:
                obj = {
                    "task_id": task.task_id,
                    "start_element": task.start_element,
                    "end_element": task.end_element,
                    "name": task.name,
                }
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
            return task

    def get(self, task_id: str) -> TaskDefinition:
        try:
            return self._tasks[task_id]
        except KeyError:
            raise UnknownTaskError(task_id) from None

    def list(self) -> list[TaskDefinition]:
        return sorted(self._tasks.values(), key=lambda t: t.task_id)


def scan_session(
    events: Sequence[InteractionEvent], start_element: str, end_element: str, max_gap_ms: int
) -> list[tuple[int, int, str]]:
    """Single forward pass over one session's events, in timestamp order.

    Returns (first index, last index, status) per candidate. Candidates are
    contiguous, non-overlapping index ranges, so every event belongs to at
    most one sequence.
    """
    out: list[tuple[int, int, str]] = []
    open_at: int | None = None
    for i, event in enumerate(events):
        if open_at is None:
            if event.element_id == start_element:
                open_at = i
            continue
        gap = event.timestamp_ms - events[i - 1].timestamp_ms
        if gap > max_gap_ms:
            out.append((open_at, i - 1, STATUS_ABORTED_GAP))
            open_at = i if event.element_id == start_element else None
            continue
        if event.element_id == start_element:
            out.append((open_at, i - 1, STATUS_ABORTED_RESTART))
            open_at = i
            continue
        if event.element_id == end_element:
            out.append((open_at, i, STATUS_COMPLETED))
            open_at = None
    if open_at is not None:
        out.append((open_at, len(events) - 1, STATUS_ABORTED_SESSION_END))
    return out


def _sequence_id(task_id: str, vehicle_id: str, session_id: str, start_index: int) -> str:
    digest = hashlib.sha1(f"{task_id}|{vehicle_id}|{session_id}|{start_index}".encode()).hexdigest()
    return f"seq-{digest[:12]}"


def extract_sequences(
    task: TaskDefinition,
    store: TelemetryStore,
    snapshot_id: int,
    config: ExtractionConfig = ExtractionConfig(),
) -> list[InteractionSequence]:
    """All task attempts in the snapshot, ordered by (vehicle, session, first event).

    Pure over the immutable snapshot: the same snapshot, task, and config
    always yield the identical sequence list.
    """
    sequences: list[InteractionSequence] = []
    for vehicle_id, session_id in store.sessions(snapshot_id):
        events, _, _ = store.read_session(snapshot_id, vehicle_id, session_id)
        sequences.extend(_session_sequences(task, vehicle_id, session_id, events, config))
    return sequences


def _session_sequences(
    task: TaskDefinition,
    vehicle_id: str,
    session_id: str,
    events: list[InteractionEvent],
    config: ExtractionConfig,
) -> list[InteractionSequence]:
    out = []
    for first, last, status in scan_session(events, task.start_element, task.end_element, config.max_gap_ms):
        if status != STATUS_COMPLETED and not config.include_aborted:
            continue
        window = tuple(events[first : last + 1])
        out.append(
            InteractionSequence(
                sequence_id=_sequence_id(task.task_id, vehicle_id, session_id, first),
                task_id=task.task_id,
                vehicle_id=vehicle_id,
                session_id=session_id,
                software_version=window[0].software_version,
                car_model=window[0].car_model,
                events=window,
                status=status,
            )
        )
    return out


def attach_context(
    sequence: InteractionSequence, store: TelemetryStore, snapshot_id: int
) -> InteractionSequence:
    """Populate the sequence's glance and signal context from its session."""
    _, glances, signals = store.read_session(snapshot_id, sequence.vehicle_id, sequence.session_id)
    return attach_context_from(sequence, glances, signals)


def attach_context_from(
    sequence: InteractionSequence,
    session_glances: Iterable[GlanceEvent],
    session_signals: Iterable[SignalSample],
) -> InteractionSequence:
    """Attach glances overlapping the event span and signals within span +/- 5 s.

    Overlap treats the span as a closed interval: a glance starting exactly at
    the span end still overlaps. Overlapping glances are kept unclipped for
    display; clipped copies (dropping any zero-length remainder) feed metrics.
    """
    span_start, span_end = sequence.span
    overlapping: list[GlanceEvent] = []
    clipped: list[GlanceEvent] = []
    for glance in session_glances:
        if glance.start_ms > span_end or glance.end_ms < span_start:
            continue
        overlapping.append(glance)
        lo = max(glance.start_ms, span_start)
        hi = min(glance.end_ms, span_end)
        if hi > lo:
            clipped.append(replace(glance, start_ms=lo, end_ms=hi))
    signals = tuple(
        s
        for s in session_signals
        if span_start - SIGNAL_PADDING_MS <= s.timestamp_ms <= span_end + SIGNAL_PADDING_MS
    )
    return replace(
        sequence,
        glances=tuple(overlapping),
        glances_clipped=tuple(clipped),
        signals=signals,
        context_attached=True,
    )


def extract_with_context(
    task: TaskDefinition,
    store: TelemetryStore,
    snapshot_id: int,
    config: ExtractionConfig = ExtractionConfig(),
) -> list[InteractionSequence]:
    """Extraction plus context attachment, reading each session only once."""
    sequences: list[InteractionSequence] = []
    for vehicle_id, session_id in store.sessions(snapshot_id):
        events, glances, signals = store.read_session(snapshot_id, vehicle_id, session_id)
        for sequence in _session_sequences(task, vehicle_id, session_id, events, config):
            sequences.append(attach_context_from(sequence, glances, signals))
    return sequences
