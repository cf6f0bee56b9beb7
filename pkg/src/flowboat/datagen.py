"""Deterministic synthetic fleet telemetry with planted flows and ground truth.

The generator stands in for a production fleet: it plants task attempts whose
paths, statuses, and timestamps are recorded in a manifest, then surrounds
them with noise interactions, glance behavior, and vehicle-bus signals. Every
planted attempt is constructed so the extraction pass recovers it exactly:

- gaps inside a planted window stay far below the extraction gap limit;
- no other event ever lands inside a window, and noise never uses the task's
  start or end element;
- an aborted window is closed either by the next window's start element
  (restart), by a quiet period longer than the gap limit, or by session end.

Identical (config, seed) produces byte-identical output files.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .catalog import element_to_obj
from .errors import GenConfigError
from .models import ExtractionConfig, UiElement

BASE_EPOCH_MS = 1_735_689_600_000  # 2025-01-01T00:00:00Z
SESSION_SPACING_MS = 3_600_000

_ACTION_CHOICES = ("tap", "scroll", "drag", "long_press")
_ACTION_WEIGHTS = (85, 6, 5, 4)


@dataclass(frozen=True, slots=True)
class FlowMix:
    path: tuple[str, ...]
    status: str  # completed | aborted
    weight: float


@dataclass(frozen=True, slots=True)
class GlanceModel:
    """Two-state alternating renewal: road vs center stack, exponential dwells."""

    mean_on_ms: int = 1200
    mean_off_ms: int = 2600


DEFAULT_MIXTURE = (
    FlowMix(("nav.home", "nav.search", "nav.kbd_enter", "nav.result_1", "nav.route_started"), "completed", 4.0),
    FlowMix(("nav.home", "nav.search", "nav.kbd_enter", "nav.result_2", "nav.route_started"), "completed", 2.0),
    FlowMix(("nav.home", "nav.recents", "nav.recent_1", "nav.route_started"), "completed", 2.0),
    FlowMix(("nav.home", "nav.search", "nav.kbd_clear"), "aborted", 1.5),
    FlowMix(("nav.home", "nav.recents"), "aborted", 0.5),
)

DEFAULT_NOISE_ELEMENTS = (
    "clim.temp_up",
    "clim.temp_down",
    "clim.fan_up",
    "clim.ac_toggle",
    "media.play_pause",
    "media.next_track",
    "media.vol_up",
    "phone.contacts",
    "phone.dial",
)

# screen -> (element_id, label, app, function, interactive, leads_to_screen)
_DEFAULT_LAYOUT: tuple[tuple[str, tuple[tuple[str, str, str, str, bool, str | None], ...]], ...] = (
    (
        "home",
        (
            ("nav.home", "Navigation", "navigation", "open navigation", True, "nav_main"),
            ("clim.home", "Climate", "climate", "open climate", True, "clim_main"),
            ("media.home", "Media", "media", "open media", True, "media_main"),
            ("phone.home", "Phone", "phone", "open phone", True, "phone_main"),
        ),
    ),
    (
        "nav_main",
        (
            ("nav.search", "Destination Search", "navigation", "open search keyboard", True, "nav_kbd"),
            ("nav.recents", "Recent Destinations", "navigation", "open recent destinations", True, "nav_recents"),
            ("nav.zoom_in", "Zoom In", "navigation", "zoom map in", True, None),
            ("nav.zoom_out", "Zoom Out", "navigation", "zoom map out", True, None),
            ("nav.map_view", "Map View", "navigation", "map canvas", False, None),
        ),
    ),
    (
        "nav_kbd",
        (
            ("nav.kbd_enter", "Keyboard Enter", "navigation", "confirm search query", True, "nav_results"),
            ("nav.kbd_clear", "Keyboard Clear", "navigation", "clear search query", True, None),
        ),
    ),
    (
        "nav_results",
        (
            ("nav.result_1", "Search Result 1", "navigation", "select first result", True, "nav_route"),
            ("nav.result_2", "Search Result 2", "navigation", "select second result", True, "nav_route"),
            ("nav.result_3", "Search Result 3", "navigation", "select third result", True, "nav_route"),
        ),
    ),
    (
        "nav_recents",
        (
            ("nav.recent_1", "Last Destination", "navigation", "select last destination", True, "nav_route"),
            ("nav.recent_2", "Previous Destination", "navigation", "select previous destination", True, "nav_route"),
        ),
    ),
    (
        "nav_route",
        (
            ("nav.route_started", "Start Guidance", "navigation", "start route guidance", True, None),
            ("nav.route_cancel", "Cancel Route", "navigation", "cancel route", True, "nav_main"),
        ),
    ),
    (
        "clim_main",
        (
            ("clim.temp_up", "Temperature Up", "climate", "raise target temperature", True, None),
            ("clim.temp_down", "Temperature Down", "climate", "lower target temperature", True, None),
            ("clim.fan_up", "Fan Up", "climate", "raise fan speed", True, None),
            ("clim.ac_toggle", "A/C", "climate", "toggle air conditioning", True, None),
        ),
    ),
    (
        "media_main",
        (
            ("media.play_pause", "Play / Pause", "media", "toggle playback", True, None),
            ("media.next_track", "Next Track", "media", "skip to next track", True, None),
            ("media.vol_up", "Volume Up", "media", "raise volume", True, None),
        ),
    ),
    (
        "phone_main",
        (
            ("phone.contacts", "Contacts", "phone", "open contacts", True, None),
            ("phone.dial", "Dial", "phone", "open dial pad", True, None),
        ),
    ),
)


@dataclass(frozen=True, slots=True)
class GenConfig:
    seed: int = 42
    n_vehicles: int = 20
    n_sessions_per_vehicle: int = 9
    planted_per_session: int = 3
    flow_mixture: tuple[FlowMix, ...] = DEFAULT_MIXTURE
    noise_event_rate_per_min: float = 5.0
    noise_elements: tuple[str, ...] = DEFAULT_NOISE_ELEMENTS
    glance_model: GlanceModel = GlanceModel()
    signal_rate_hz: float = 10.0
    software_versions: tuple[tuple[str, float], ...] = (("1.0.0", 2.0), ("1.1.0", 1.0))
    car_models: tuple[tuple[str, float], ...] = (("sedan", 2.0), ("suv", 1.0), ("roadster", 1.0))

    @property
    def task_start(self) -> str:
        return self.flow_mixture[0].path[0]

    @property
    def task_end(self) -> str:
        for mix in self.flow_mixture:
            if mix.status == "completed":
                return mix.path[-1]
        raise GenConfigError("flow mixture needs at least one completed flow")


def validate_config(config: GenConfig) -> None:
    if config.n_vehicles < 1 or config.n_sessions_per_vehicle < 1 or config.planted_per_session < 1:
        raise GenConfigError("vehicle, session, and planted counts must be >= 1")
    if config.noise_event_rate_per_min < 0:
        raise GenConfigError("noise_event_rate_per_min must be >= 0")
    if config.signal_rate_hz <= 0:
        raise GenConfigError("signal_rate_hz must be > 0")
    if config.glance_model.mean_on_ms <= 0 or config.glance_model.mean_off_ms <= 0:
        raise GenConfigError("glance dwell means must be > 0")
    if not config.flow_mixture:
        raise GenConfigError("flow mixture must not be empty")
    for mix in config.flow_mixture:
        if len(mix.path) < 2:
            raise GenConfigError(f"flow path needs at least 2 elements: {list(mix.path)}")
        if mix.status not in ("completed", "aborted"):
            raise GenConfigError(f"flow status must be completed or aborted: {mix.status!r}")
        if mix.weight <= 0:
            raise GenConfigError("flow weights must be > 0")
    starts = {mix.path[0] for mix in config.flow_mixture}
    if len(starts) != 1:
        raise GenConfigError(f"all flow paths must share one start element, got {sorted(starts)}")
    start = config.task_start
    end = config.task_end
    if start == end:
        raise GenConfigError("task start and end element must differ")
    for mix in config.flow_mixture:
        interior = mix.path[1:-1] if mix.status == "completed" else mix.path[1:]
        if start in interior:
            raise GenConfigError(f"start element may only open a planted path: {list(mix.path)}")
        if mix.status == "completed":
            if mix.path[-1] != end:
                raise GenConfigError(f"completed paths must end at {end!r}: {list(mix.path)}")
            if end in mix.path[:-1]:
                raise GenConfigError(f"end element may only close a planted path: {list(mix.path)}")
        else:
            if end in mix.path:
                raise GenConfigError(f"aborted paths must avoid the end element: {list(mix.path)}")
    for element_id in config.noise_elements:
        if element_id in (start, end):
            raise GenConfigError(f"noise elements must avoid the task bounds: {element_id!r}")
    for name, pairs in (("software_versions", config.software_versions), ("car_models", config.car_models)):
        if not pairs:
            raise GenConfigError(f"{name} must not be empty")
        if any(weight <= 0 for _, weight in pairs):
            raise GenConfigError(f"{name} weights must be > 0")


def config_from_obj(obj: Mapping) -> GenConfig:
    """GenConfig from a decoded JSON mapping; absent fields keep their defaults."""
    kwargs: dict = {}
    for name in ("seed", "n_vehicles", "n_sessions_per_vehicle", "planted_per_session"):
        if name in obj:
            kwargs[name] = int(obj[name])
    for name in ("noise_event_rate_per_min", "signal_rate_hz"):
        if name in obj:
            kwargs[name] = float(obj[name])
    if "flow_mixture" in obj:
        kwargs["flow_mixture"] = tuple(
            FlowMix(path=tuple(m["path"]), status=m["status"], weight=float(m.get("weight", 1.0)))
            for m in obj["flow_mixture"]
        )
    if "noise_elements" in obj:
        kwargs["noise_elements"] = tuple(obj["noise_elements"])
    if "glance_model" in obj:
        gm = obj["glance_model"]
        kwargs["glance_model"] = GlanceModel(
            mean_on_ms=int(gm.get("mean_on_ms", 1200)), mean_off_ms=int(gm.get("mean_off_ms", 2600))
        )
    for name in ("software_versions", "car_models"):
        if name in obj:
            kwargs[name] = tuple(sorted((str(k), float(v)) for k, v in obj[name].items()))
    return GenConfig(**kwargs)


def load_config(path: str | Path) -> GenConfig:
    with Path(path).open(encoding="utf-8") as fh:
        return config_from_obj(json.load(fh))


# -- manifest ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PlantedSequence:
    vehicle_id: str
    session_id: str
    path: tuple[str, ...]
    status: str
    software_version: str
    car_model: str
    timestamps: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Manifest:
    """Ground truth for one generated dataset."""

    start_element: str
    end_element: str
    planted: tuple[PlantedSequence, ...]

    def flow_counts(
        self, software_versions: set[str] | None = None, car_models: set[str] | None = None
    ) -> dict[tuple[tuple[str, ...], str], int]:
        """Planted count per (path, status), optionally restricted by fleet dimensions."""
        counts: dict[tuple[tuple[str, ...], str], int] = {}
        for planted in self.planted:
            if software_versions is not None and planted.software_version not in software_versions:
                continue
            if car_models is not None and planted.car_model not in car_models:
                continue
            key = (planted.path, planted.status)
            counts[key] = counts.get(key, 0) + 1
        return counts

    @classmethod
    def load(cls, path: str | Path) -> "Manifest":
        start_element = end_element = None
        planted: list[PlantedSequence] = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            obj = json.loads(line)
            if obj["record"] == "task":
                start_element = obj["start_element"]
                end_element = obj["end_element"]
            else:
                planted.append(
                    PlantedSequence(
                        vehicle_id=obj["vehicle_id"],
                        session_id=obj["session_id"],
                        path=tuple(obj["path"]),
                        status=obj["status"],
                        software_version=obj["software_version"],
                        car_model=obj["car_model"],
                        timestamps=tuple(obj["timestamps"]),
                    )
                )
        if start_element is None or end_element is None:
            raise GenConfigError(f"manifest {path} has no task record")
        return cls(start_element=start_element, end_element=end_element, planted=tuple(planted))


@dataclass(frozen=True, slots=True)
class GeneratedDataset:
    interactions_path: Path
    glances_path: Path
    signals_path: Path
    manifest_path: Path
    catalog_path: Path
    manifest: Manifest


# -- generation ----------------------------------------------------------------


@dataclass(slots=True)
class _SessionData:
    events: list[tuple[int, str, str]] = field(default_factory=list)  # (ts, element, action)
    glances: list[tuple[str, int, int]] = field(default_factory=list)  # (aoi, start, end)
    signals: list[tuple[int, float, float]] = field(default_factory=list)  # (ts, speed, steering)
    planted: list[PlantedSequence] = field(default_factory=list)


def _weighted_choice(rng: random.Random, pairs: Iterable[tuple], *, attr: str | None = None):
    items = list(pairs)
    weights = [item.weight if attr else item[1] for item in items]
    picked = rng.choices(items, weights=weights, k=1)[0]
    return picked if attr else picked[0]


def _gen_session(
    config: GenConfig,
    vehicle_id: str,
    session_id: str,
    session_index: int,
    car_model: str,
    max_gap_ms: int,
) -> _SessionData:
    rng = random.Random(f"{config.seed}:session:{vehicle_id}:{session_id}")
    data = _SessionData()
    base = BASE_EPOCH_MS + session_index * SESSION_SPACING_MS
    software_version = _weighted_choice(rng, config.software_versions)

    # plan the planted windows first, then fill the gaps with noise
    windows: list[tuple[FlowMix, list[int]]] = []
    cursor = base + rng.randint(5_000, 20_000)
    noise_zones: list[tuple[int, int]] = [(base, cursor - 1_500)]
    for k in range(config.planted_per_session):
        mix = _weighted_choice(rng, config.flow_mixture, attr="weight")
        times = [cursor]
        for _ in range(len(mix.path) - 1):
            times.append(times[-1] + rng.randint(600, 3_500))
        windows.append((mix, times))
        last = times[-1]
        is_final = k == config.planted_per_session - 1
        if mix.status == "completed":
            # candidate closes at the end element; anything may follow
            nxt = last + rng.randint(4_000, 12_000)
            tail = last + 1_500 + rng.randint(2_000, 10_000)
            noise_zones.append((last + 1_500, tail if is_final else nxt - 1_500))
        else:
            # keep the window's path intact: nothing may arrive while the
            # candidate is still open, so the closer is either the next
            # window's start element (restart), a gap breach, or session end
            if is_final:
                nxt = last
            elif rng.random() < 0.5:
                nxt = last + rng.randint(5_000, 15_000)
            else:
                nxt = last + max_gap_ms + rng.randint(1_000, 9_000)
        cursor = nxt
    for mix, times in windows:
        data.planted.append(
            PlantedSequence(
                vehicle_id=vehicle_id,
                session_id=session_id,
                path=mix.path,
                status=mix.status,
                software_version=software_version,
                car_model=car_model,
                timestamps=tuple(times),
            )
        )
        for ts, element_id in zip(times, mix.path):
            data.events.append((ts, element_id, _pick_action(rng)))

    if config.noise_elements and config.noise_event_rate_per_min > 0:
        rate_per_ms = config.noise_event_rate_per_min / 60_000.0
        for lo, hi in noise_zones:
            t = float(lo)
            prev = lo - 1
            while True:
                t += rng.expovariate(rate_per_ms)
                ts = max(int(t), prev + 1)
                if ts >= hi:
                    break
                data.events.append((ts, rng.choice(config.noise_elements), _pick_action(rng)))
                prev = ts
    data.events.sort()

    session_end = data.events[-1][0] + rng.randint(2_000, 5_000)
    signal_start = base - 8_000
    period = max(1, round(1_000.0 / config.signal_rate_hz))
    speed = rng.uniform(4.0, 30.0)
    steering = 0.0
    for ts in range(signal_start, session_end + 3_000, period):
        speed = min(40.0, max(0.0, speed + rng.gauss(0.0, 0.35)))
        steering = min(180.0, max(-180.0, steering * 0.92 + rng.gauss(0.0, 2.5)))
        data.signals.append((ts, round(speed, 3), round(steering, 3)))

    aoi = "road"
    t = signal_start
    while t < session_end:
        mean = config.glance_model.mean_on_ms if aoi == "center_stack" else config.glance_model.mean_off_ms
        dwell = max(250, int(rng.expovariate(1.0 / mean)))
        end = min(t + dwell, session_end)
        if end > t:
            data.glances.append((aoi, t, end))
        t = end + 1
        aoi = "center_stack" if aoi == "road" else "road"
    return data


def _pick_action(rng: random.Random) -> str:
    return rng.choices(_ACTION_CHOICES, weights=_ACTION_WEIGHTS, k=1)[0]


def generate(config: GenConfig, out_dir: str | Path) -> GeneratedDataset:
    """Write the three log files, the catalog, and the ground-truth manifest.

    Planted windows always survive extraction unchanged under the default
    extraction config, so manifest counts equal pipeline flow counts exactly.
    """
    validate_config(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    max_gap_ms = ExtractionConfig().max_gap_ms

    interactions_path = out / "interactions.jsonl"
    glances_path = out / "glances.jsonl"
    signals_path = out / "signals.jsonl"
    manifest_path = out / "manifest.jsonl"

    planted_all: list[PlantedSequence] = []
    session_index = 0
    with interactions_path.open("w", encoding="utf-8") as f_int, glances_path.open(
        "w", encoding="utf-8"
    ) as f_gla, signals_path.open("w", encoding="utf-8") as f_sig:
        for vi in range(config.n_vehicles):
            vehicle_id = f"veh-{vi:03d}"
            vehicle_rng = random.Random(f"{config.seed}:vehicle:{vehicle_id}")
            car_model = _weighted_choice(vehicle_rng, config.car_models)
            for si in range(config.n_sessions_per_vehicle):
                session_id = f"s-{si:03d}"
                data = _gen_session(config, vehicle_id, session_id, session_index, car_model, max_gap_ms)
                session_index += 1
                planted_all.extend(data.planted)
                software_version = data.planted[0].software_version
                for ts, element_id, action in data.events:
                    f_int.write(
                        json.dumps(
                            {
                                "vehicle_id": vehicle_id,
                                "session_id": session_id,
                                "timestamp_ms": ts,
                                "element_id": element_id,
                                "action": action,
                                "software_version": software_version,
                                "car_model": car_model,
                            },
                            separators=(",", ":"),
                        )
                        + "\n"
                    )
                for aoi, start, end in data.glances:
                    f_gla.write(
                        json.dumps(
                            {
                                "vehicle_id": vehicle_id,
                                "session_id": session_id,
                                "aoi": aoi,
                                "start_ms": start,
                                "end_ms": end,
                            },
                            separators=(",", ":"),
                        )
                        + "\n"
                    )
                for ts, speed, steering in data.signals:
                    f_sig.write(
                        json.dumps(
                            {
                                "vehicle_id": vehicle_id,
                                "session_id": session_id,
                                "timestamp_ms": ts,
                                "speed_mps": speed,
                                "steering_angle_deg": steering,
                            },
                            separators=(",", ":"),
                        )
                        + "\n"
                    )

    manifest = Manifest(
        start_element=config.task_start,
        end_element=config.task_end,
        planted=tuple(planted_all),
    )
    with manifest_path.open("w", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {"record": "task", "start_element": manifest.start_element, "end_element": manifest.end_element},
                separators=(",", ":"),
            )
            + "\n"
        )
        for planted in manifest.planted:
            fh.write(
                json.dumps(
                    {
                        "record": "planted",
                        "vehicle_id": planted.vehicle_id,
                        "session_id": planted.session_id,
                        "path": list(planted.path),
                        "status": planted.status,
                        "software_version": planted.software_version,
                        "car_model": planted.car_model,
                        "timestamps": list(planted.timestamps),
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )

    catalog_path = out / "catalog.jsonl"
    write_catalog(config, catalog_path)
    return GeneratedDataset(
        interactions_path=interactions_path,
        glances_path=glances_path,
        signals_path=signals_path,
        manifest_path=manifest_path,
        catalog_path=catalog_path,
        manifest=manifest,
    )


def catalog_elements(config: GenConfig) -> list[UiElement]:
    """Catalog covering every element id the generator can emit.

    The built-in screen layout covers the default universe; ids outside it get
    a generic per-app screen plus a launcher on the home screen, which keeps
    every screen reachable from home.
    """
    validate_config(config)
    elements: list[UiElement] = []
    known: set[str] = set()
    for screen_id, entries in _DEFAULT_LAYOUT:
        for element_id, label, app, function, interactive, leads_to in entries:
            elements.append(
                UiElement(
                    element_id=element_id,
                    label=label,
                    app=app,
                    screen_id=screen_id,
                    function=function,
                    interactive=interactive,
                    leads_to_screen=leads_to,
                )
            )
            known.add(element_id)

    emitted: set[str] = set(config.noise_elements)
    for mix in config.flow_mixture:
        emitted.update(mix.path)
    extra = sorted(emitted - known)
    extra_apps: dict[str, list[str]] = {}
    for element_id in extra:
        app = element_id.split(".", 1)[0]
        extra_apps.setdefault(app, []).append(element_id)
    for app in sorted(extra_apps):
        screen_id = f"{app}_misc"
        launcher_id = f"open.{app}_misc"
        elements.append(
            UiElement(
                element_id=launcher_id,
                label=f"{app.capitalize()} Extras",
                app=app,
                screen_id="home",
                function=f"open {app} extras",
                interactive=True,
                leads_to_screen=screen_id,
            )
        )
        for element_id in extra_apps[app]:
            elements.append(
                UiElement(
                    element_id=element_id,
                    label=element_id.replace(".", " ").replace("_", " ").title(),
                    app=app,
                    screen_id=screen_id,
                    function=f"activate {element_id}",
                    interactive=True,
                )
            )
    return elements


def write_catalog(config: GenConfig, path: str | Path) -> int:
    """Write the catalog file for ``config``; returns the element count."""
    elements = catalog_elements(config)
    with Path(path).open("w", encoding="utf-8") as fh:
        for element in elements:
            fh.write(json.dumps(element_to_obj(element), separators=(",", ":")) + "\n")
    return len(elements)
