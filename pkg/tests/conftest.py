from __future__ import annotations

import json

import pytest

from flowboat.catalog import ConceptCatalog
from flowboat.models import GlanceEvent, InteractionEvent, SignalSample, UiElement

TEST_ELEMENTS = [
    UiElement("nav.home", "Navigation", "navigation", "home", "open navigation", True, "nav_main"),
    UiElement("nav.search", "Destination Search", "navigation", "nav_main", "open keyboard", True, "nav_kbd"),
    UiElement("nav.kbd_enter", "Keyboard Enter", "navigation", "nav_kbd", "confirm query", True, "nav_results"),
    UiElement("nav.result_1", "Search Result 1", "navigation", "nav_results", "select result", True, None),
    UiElement("nav.route_started", "Start Guidance", "navigation", "nav_results", "start guidance", True, None),
    UiElement("nav.map_view", "Map View", "navigation", "nav_main", "map canvas", False, None),
    UiElement("clim.home", "Climate Home", "climate", "home", "open climate", True, "clim_main"),
    UiElement("clim.fan", "Climate Fan", "climate", "clim_main", "fan speed", True, None),
    UiElement("media.play", "Play", "media", "home", "toggle playback", True, None),
]


@pytest.fixture()
def catalog() -> ConceptCatalog:
    return ConceptCatalog(TEST_ELEMENTS)


@pytest.fixture()
def catalog_file(tmp_path):
    path = tmp_path / "catalog.jsonl"
    lines = []
    for e in TEST_ELEMENTS:
        obj = {
            "element_id": e.element_id,
            "label": e.label,
            "app": e.app,
            "screen_id": e.screen_id,
            "function": e.function,
            "interactive": e.interactive,
        }
        if e.leads_to_screen:
            obj["leads_to_screen"] = e.leads_to_screen
        lines.append(json.dumps(obj))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def make_event(
    ts: int,
    element: str,
    vehicle: str = "v1",
    session: str = "s1",
    action: str = "tap",
    software: str = "1.0.0",
    model: str = "sedan",
) -> InteractionEvent:
    return InteractionEvent(vehicle, session, ts, element, action, software, model)


def make_glance(start: int, end: int, aoi: str = "center_stack", vehicle: str = "v1", session: str = "s1") -> GlanceEvent:
    return GlanceEvent(vehicle, session, aoi, start, end)


def make_signal(ts: int, speed: float, steering: float = 0.0, vehicle: str = "v1", session: str = "s1") -> SignalSample:
    return SignalSample(vehicle, session, ts, speed, steering)


def event_line(ts: int, element: str, **kw) -> str:
    event = make_event(ts, element, **kw)
    return json.dumps(
        {
            "vehicle_id": event.vehicle_id,
            "session_id": event.session_id,
            "timestamp_ms": event.timestamp_ms,
            "element_id": event.element_id,
            "action": event.action,
            "software_version": event.software_version,
            "car_model": event.car_model,
        }
    )


def glance_line(start: int, end: int, aoi: str = "center_stack", vehicle: str = "v1", session: str = "s1") -> str:
    return json.dumps(
        {"vehicle_id": vehicle, "session_id": session, "aoi": aoi, "start_ms": start, "end_ms": end}
    )


def signal_line(ts: int, speed: float, steering: float = 0.0, vehicle: str = "v1", session: str = "s1") -> str:
    return json.dumps(
        {
            "vehicle_id": vehicle,
            "session_id": session,
            "timestamp_ms": ts,
            "speed_mps": speed,
            "steering_angle_deg": steering,
        }
    )


@pytest.fixture(scope="session")
def seed42_dataset(tmp_path_factory):
    """The default seed-42 generated dataset, shared across API and acceptance tests."""
    from flowboat.datagen import GenConfig, generate

    out = tmp_path_factory.mktemp("seed42")
    return generate(GenConfig(seed=42), out)
