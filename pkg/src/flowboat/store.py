"""Telemetry log store: validating ingest, append-only persistence, snapshots.

Layout on disk (all line-delimited JSON, UTF-8):

    <data_dir>/interactions.jsonl
    <data_dir>/glances.jsonl
    <data_dir>/signals.jsonl
    <data_dir>/snapshots.jsonl

Segment files are append-only; a snapshot is a per-kind record-count
watermark, so any published snapshot keeps returning identical results while
new ingests run. Single writer, many readers: mutation is serialized through
one lock, reads only touch the append-only prefix below their watermark.
"""

from __future__ import annotations

import json
import math
import threading
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import StoreError, UnknownSnapshotError
from .models import ACTIONS, AOIS, GlanceEvent, InteractionEvent, SignalSample

KIND_INTERACTIONS = "interactions"
KIND_GLANCES = "glances"
KIND_SIGNALS = "signals"
RECORD_KINDS = (KIND_INTERACTIONS, KIND_GLANCES, KIND_SIGNALS)

REASON_INVALID_JSON = "invalid_json"
REASON_MISSING_FIELD = "missing_field"
REASON_INVALID_VALUE = "invalid_value"
REASON_INVALID_INTERVAL = "invalid_interval"
REASON_DUPLICATE = "duplicate"
REASON_OVERLAP = "overlap"

_REQUIRED_FIELDS = {
    KIND_INTERACTIONS: (
        "vehicle_id",
        "session_id",
        "timestamp_ms",
        "element_id",
        "action",
        "software_version",
        "car_model",
    ),
    KIND_GLANCES: ("vehicle_id", "session_id", "aoi", "start_ms", "end_ms"),
    KIND_SIGNALS: ("vehicle_id", "session_id", "timestamp_ms", "speed_mps", "steering_angle_deg"),
}


@dataclass(frozen=True, slots=True)
class LineRejection:
    line_no: int
    reason: str
    detail: str


@dataclass(frozen=True, slots=True)
class IngestReport:
    """Per-file ingest outcome; accepted + rejected equals the input line count."""

    kind: str
    accepted: int
    rejected: int
    reject_reasons: tuple[LineRejection, ...]

    @property
    def reasons(self) -> tuple[str, ...]:
        return tuple(r.reason for r in self.reject_reasons)


@dataclass(frozen=True, slots=True)
class SnapshotInfo:
    snapshot_id: int
    counts: dict[str, int]


class _Reject(Exception):
    def __init__(self, reason: str, detail: str) -> None:
        self.reason = reason
        self.detail = detail


def _require_str(obj: dict, name: str) -> str:
    value = obj[name]
    if not isinstance(value, str) or not value:
        raise _Reject(REASON_INVALID_VALUE, f"{name} must be a non-empty string")
    return value


def _require_int(obj: dict, name: str) -> int:
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise _Reject(REASON_INVALID_VALUE, f"{name} must be an integer")
    return value


def _require_number(obj: dict, name: str) -> float:
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise _Reject(REASON_INVALID_VALUE, f"{name} must be a finite number")
    return float(value)


def parse_record(kind: str, obj: dict) -> InteractionEvent | GlanceEvent | SignalSample:
    """Validate one decoded line against its record contract.

    Unknown extra fields are ignored; missing or malformed required fields
    raise an internal rejection consumed by the ingest loop.
    """
    for name in _REQUIRED_FIELDS[kind]:
        if name not in obj:
            raise _Reject(REASON_MISSING_FIELD, name)
    if kind == KIND_INTERACTIONS:
        timestamp = _require_int(obj, "timestamp_ms")
        if timestamp <= 0:
            raise _Reject(REASON_INVALID_VALUE, "timestamp_ms must be > 0")
        action = _require_str(obj, "action")
        if action not in ACTIONS:
            raise _Reject(REASON_INVALID_VALUE, f"unknown action {action!r}")
        return InteractionEvent(
            vehicle_id=_require_str(obj, "vehicle_id"),
            session_id=_require_str(obj, "session_id"),
            timestamp_ms=timestamp,
            element_id=_require_str(obj, "element_id"),
            action=action,
            software_version=_require_str(obj, "software_version"),
            car_model=_require_str(obj, "car_model"),
        )
    if kind == KIND_GLANCES:
        aoi = _require_str(obj, "aoi")
        if aoi not in AOIS:
            raise _Reject(REASON_INVALID_VALUE, f"unknown aoi {aoi!r}")
        start = _require_int(obj, "start_ms")
        end = _require_int(obj, "end_ms")
        if start < 0:
            raise _Reject(REASON_INVALID_VALUE, "start_ms must be >= 0")
        if end <= start:
            raise _Reject(REASON_INVALID_INTERVAL, f"end_ms {end} <= start_ms {start}")
        return GlanceEvent(
            vehicle_id=_require_str(obj, "vehicle_id"),
            session_id=_require_str(obj, "session_id"),
            aoi=aoi,
            start_ms=start,
            end_ms=end,
        )
    if kind == KIND_SIGNALS:
        timestamp = _require_int(obj, "timestamp_ms")
        speed = _require_number(obj, "speed_mps")
        if speed < 0:
            raise _Reject(REASON_INVALID_VALUE, "speed_mps must be >= 0")
        steering = _require_number(obj, "steering_angle_deg")
        if not -720.0 <= steering <= 720.0:
            raise _Reject(REASON_INVALID_VALUE, "steering_angle_deg out of [-720, 720]")
        return SignalSample(
            vehicle_id=_require_str(obj, "vehicle_id"),
            session_id=_require_str(obj, "session_id"),
            timestamp_ms=timestamp,
            speed_mps=speed,
            steering_angle_deg=steering,
        )
    raise StoreError(f"unknown record kind: {kind!r}")


def record_to_obj(kind: str, record: InteractionEvent | GlanceEvent | SignalSample) -> dict:
    """Normalized wire object for one record, keys in the declared field order."""
    return {name: getattr(record, name) for name in _REQUIRED_FIELDS[kind]}


@dataclass
class _KindState:
    """Accepted records of one kind plus the indexes needed for validation."""

    records: list = field(default_factory=list)
    # (vehicle_id, session_id) -> arrival indices into ``records``
    sessions: dict[tuple[str, str], list[int]] = field(default_factory=dict)
    # interactions: seen (ts, element) keys; signals: seen timestamps;
    # glances: accepted (start, end) intervals kept sorted for overlap checks
    session_keys: dict[tuple[str, str], set] = field(default_factory=dict)
    session_intervals: dict[tuple[str, str], list[tuple[int, int]]] = field(default_factory=dict)


class TelemetryStore:
    """Validating store for interaction, glance, and signal logs.

    With ``data_dir`` set, accepted records persist across restarts in
    append-only segment files; without it the store is purely in-memory.
    """

    def __init__(self, data_dir: str | Path | None = None) -> None:
        self._lock = threading.RLock()
        self._state: dict[str, _KindState] = {kind: _KindState() for kind in RECORD_KINDS}
        self._snapshots: dict[int, dict[str, int]] = {}
        self._next_snapshot_id = 1
        self._data_dir: Path | None = None
        if data_dir is not None:
            self._data_dir = Path(data_dir)
            self._data_dir.mkdir(parents=True, exist_ok=True)
            self._reload()

    # -- ingest --------------------------------------------------------------

    def ingest_file(self, path: str | Path, kind: str) -> IngestReport:
        """Ingest one line-delimited log file; invalid lines are counted, never dropped silently."""
        if kind not in RECORD_KINDS:
            raise StoreError(f"unknown record kind: {kind!r}")
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreError(f"cannot read {path}: {exc}") from exc
        return self.ingest_lines(text.splitlines(), kind)

    def ingest_lines(self, lines: Iterable[str], kind: str) -> IngestReport:
        if kind not in RECORD_KINDS:
            raise StoreError(f"unknown record kind: {kind!r}")
        accepted: list = []
        rejections: list[LineRejection] = []
        with self._lock:
            for line_no, line in enumerate(lines, start=1):
                try:
                    record = self._validate_line(kind, line)
                except _Reject as rej:
                    rejections.append(LineRejection(line_no, rej.reason, rej.detail))
                    continue
                self._insert(kind, record)
                accepted.append(record)
            self._append_segment(kind, accepted)
        return IngestReport(
            kind=kind,
            accepted=len(accepted),
            rejected=len(rejections),
            reject_reasons=tuple(rejections),
        )

    def _validate_line(self, kind: str, line: str):
        stripped = line.strip()
        if not stripped:
            raise _Reject(REASON_INVALID_JSON, "empty line")
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise _Reject(REASON_INVALID_JSON, str(exc)) from exc
        if not isinstance(obj, dict):
            raise _Reject(REASON_INVALID_JSON, "line is not an object")
        record = parse_record(kind, obj)
        self._check_session_invariants(kind, record)
        return record

    def _check_session_invariants(self, kind: str, record) -> None:
        state = self._state[kind]
        session = (record.vehicle_id, record.session_id)
        if kind == KIND_INTERACTIONS:
            key = (record.timestamp_ms, record.element_id)
            if key in state.session_keys.get(session, ()):
                raise _Reject(
                    REASON_DUPLICATE,
                    f"interaction at {record.timestamp_ms} on {record.element_id!r} already ingested",
                )
        elif kind == KIND_SIGNALS:
            if record.timestamp_ms in state.session_keys.get(session, ()):
                raise _Reject(REASON_DUPLICATE, f"signal sample at {record.timestamp_ms} already ingested")
        elif kind == KIND_GLANCES:
            intervals = state.session_intervals.get(session)
            if intervals and _overlaps_any(intervals, record.start_ms, record.end_ms):
                raise _Reject(REASON_OVERLAP, f"glance [{record.start_ms}, {record.end_ms}] overlaps an accepted glance")

    def _insert(self, kind: str, record) -> None:
        state = self._state[kind]
        session = (record.vehicle_id, record.session_id)
        index = len(state.records)
        state.records.append(record)
        state.sessions.setdefault(session, []).append(index)
        if kind == KIND_INTERACTIONS:
            state.session_keys.setdefault(session, set()).add((record.timestamp_ms, record.element_id))
        elif kind == KIND_SIGNALS:
            state.session_keys.setdefault(session, set()).add(record.timestamp_ms)
        elif kind == KIND_GLANCES:
            insort(state.session_intervals.setdefault(session, []), (record.start_ms, record.end_ms))

    # -- snapshots -----------------------------------------------------------

    def publish_snapshot(self) -> int:
        """Freeze the current per-kind record counts under a fresh snapshot id."""
        with self._lock:
            snapshot_id = self._next_snapshot_id
            self._next_snapshot_id += 1
            counts = {kind: len(self._state[kind].records) for kind in RECORD_KINDS}
            self._snapshots[snapshot_id] = counts
            self._append_snapshot_record(snapshot_id, counts)
            return snapshot_id

    def latest_snapshot_id(self) -> int | None:
        with self._lock:
            if not self._snapshots:
                return None
            return max(self._snapshots)

    def snapshot_info(self, snapshot_id: int) -> SnapshotInfo:
        counts = self._watermarks(snapshot_id)
        return SnapshotInfo(snapshot_id=snapshot_id, counts=dict(counts))

    def _watermarks(self, snapshot_id: int) -> dict[str, int]:
        with self._lock:
            try:
                return self._snapshots[snapshot_id]
            except KeyError:
                raise UnknownSnapshotError(snapshot_id) from None

    # -- reads ---------------------------------------------------------------

    def read_session(
        self, snapshot_id: int, vehicle_id: str, session_id: str
    ) -> tuple[list[InteractionEvent], list[GlanceEvent], list[SignalSample]]:
        """Session records visible in the snapshot, each kind in its declared order.

        Unknown sessions yield empty lists; a session may hold only one record
        kind (e.g. signals without any touchscreen activity).
        """
        marks = self._watermarks(snapshot_id)
        session = (vehicle_id, session_id)
        events = self._session_records(KIND_INTERACTIONS, session, marks)
        glances = self._session_records(KIND_GLANCES, session, marks)
        signals = self._session_records(KIND_SIGNALS, session, marks)
        events.sort(key=lambda e: e.timestamp_ms)
        glances.sort(key=lambda g: g.start_ms)
        signals.sort(key=lambda s: s.timestamp_ms)
        return events, glances, signals

    def _session_records(self, kind: str, session: tuple[str, str], marks: dict[str, int]) -> list:
        state = self._state[kind]
        watermark = marks[kind]
        indices = state.sessions.get(session, [])
        cut = bisect_left(indices, watermark)
        return [state.records[i] for i in indices[:cut]]

    def sessions(self, snapshot_id: int, kind: str = KIND_INTERACTIONS) -> list[tuple[str, str]]:
        """Sorted (vehicle_id, session_id) keys with >= 1 record of ``kind`` in the snapshot."""
        marks = self._watermarks(snapshot_id)
        state = self._state[kind]
        watermark = marks[kind]
        return sorted(key for key, indices in state.sessions.items() if indices and indices[0] < watermark)

    def element_ids(self, snapshot_id: int) -> set[str]:
        """Distinct element ids over all interaction events in the snapshot."""
        marks = self._watermarks(snapshot_id)
        records = self._state[KIND_INTERACTIONS].records
        return {records[i].element_id for i in range(marks[KIND_INTERACTIONS])}

    # -- persistence ---------------------------------------------------------

    def _segment_path(self, kind: str) -> Path:
        assert self._data_dir is not None
        return self._data_dir / f"{kind}.jsonl"

    def _snapshot_path(self) -> Path:
        assert self._data_dir is not None
        return self._data_dir / "snapshots.jsonl"

    def _append_segment(self, kind: str, records: list) -> None:
        if self._data_dir is None or not records:
            return
        with self._segment_path(kind).open("a", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record_to_obj(kind, record), separators=(",", ":")) + "\n")

    def _append_snapshot_record(self, snapshot_id: int, counts: dict[str, int]) -> None:
        if self._data_dir is None:
            return
        with self._snapshot_path().open("a", encoding="utf-8") as fh:
            fh.write(json.dumps({"snapshot_id": snapshot_id, "counts": counts}, separators=(",", ":")) + "\n")

    def _reload(self) -> None:
        assert self._data_dir is not None
        for kind in RECORD_KINDS:
            path = self._segment_path(kind)
            if not path.exists():
                continue
            for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
                try:
                    record = self._validate_line(kind, line)
                except _Reject as rej:
                    raise StoreError(f"corrupt segment {path} line {line_no}: {rej.reason} ({rej.detail})")
                self._insert(kind, record)
        snap_path = self._snapshot_path()
        if snap_path.exists():
            for line in snap_path.read_text(encoding="utf-8").splitlines():
                obj = json.loads(line)
                snapshot_id = int(obj["snapshot_id"])
                self._snapshots[snapshot_id] = {k: int(v) for k, v in obj["counts"].items()}
                self._next_snapshot_id = max(self._next_snapshot_id, snapshot_id + 1)


def _overlaps_any(intervals: list[tuple[int, int]], start: int, end: int) -> bool:
    """True iff [start, end) strictly overlaps any interval; touching endpoints are fine."""
    pos = bisect_left(intervals, (start, end))
    if pos < len(intervals) and intervals[pos][0] < end:
        return True
    if pos > 0 and intervals[pos - 1][1] > start:
        return True
    return False
