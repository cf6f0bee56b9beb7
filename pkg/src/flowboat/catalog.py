"""Catalog of all interactive UI elements plus the screen-adjacency graph.

The catalog file is line-delimited JSON, one element per line:

    {"element_id", "label", "app", "screen_id", "function", "interactive", "leads_to_screen"?}

``leads_to_screen`` encodes where the UI navigates when the element is
activated; the recording emulator walks this graph. Loading replaces any
previous catalog atomically, so concurrent readers always see one consistent
version.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import CatalogError
from .models import UiElement

RANK_EXACT_ID = 0
RANK_LABEL_PREFIX = 1
RANK_SUBSTRING = 2


@dataclass(frozen=True, slots=True)
class Screen:
    screen_id: str
    elements: tuple[UiElement, ...]


@dataclass(frozen=True, slots=True)
class CoverageReport:
    """Which ingested element ids resolve against the catalog."""

    total_distinct: int
    unknown: tuple[str, ...]

    @property
    def resolved(self) -> int:
        return self.total_distinct - len(self.unknown)


class ConceptCatalog:
    """In-memory element catalog with search, resolution, and the screen graph."""

    def __init__(self, elements: Iterable[UiElement] = ()) -> None:
        self._by_id: dict[str, UiElement] = {}
        self._replace(list(elements))

    def _replace(self, elements: list[UiElement]) -> None:
        by_id: dict[str, UiElement] = {}
        screens: dict[str, list[UiElement]] = {}
        for element in elements:
            if element.element_id in by_id:
                raise CatalogError(f"duplicate element_id: {element.element_id!r}", detail=element.element_id)
            by_id[element.element_id] = element
            screens.setdefault(element.screen_id, []).append(element)
        for element in elements:
            if element.leads_to_screen is not None and element.leads_to_screen not in screens:
                raise CatalogError(
                    f"element {element.element_id!r} leads to unknown screen {element.leads_to_screen!r}",
                    detail=element.element_id,
                )
        self._by_id = by_id
        self._screens = {sid: tuple(sorted(els, key=lambda e: e.element_id)) for sid, els in screens.items()}

    def load_file(self, path: str | Path) -> int:
        """Parse and atomically install a catalog file; returns the element count."""
        elements: list[UiElement] = []
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
        for line_no, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CatalogError(f"catalog line {line_no} is not valid JSON: {exc}") from exc
            elements.append(_element_from_obj(obj, line_no))
        self._replace(elements)
        return len(elements)

    def __len__(self) -> int:
        return len(self._by_id)

    def resolve(self, element_id: str) -> UiElement | None:
        """The unique element for ``element_id``, or None when unknown.

        Callers must render unknown elements distinctly instead of crashing.
        """
        return self._by_id.get(element_id)

    def search(self, query: str, limit: int = 20) -> list[UiElement]:
        """Ranked search: exact id, then label prefix, then substring anywhere.

        Substring matching covers label, app, and function, case-insensitively.
        Ties break lexicographically by element_id; at most ``limit`` results.
        """
        if not query or limit <= 0:
            return []
        needle = query.lower()
        ranked: list[tuple[int, str]] = []
        for element in self._by_id.values():
            rank = _match_rank(element, query, needle)
            if rank is not None:
                ranked.append((rank, element.element_id))
        ranked.sort()
        return [self._by_id[eid] for _, eid in ranked[:limit]]

    def screens(self) -> list[Screen]:
        """All screens with their elements, sorted for stable rendering."""
        return [Screen(sid, self._screens[sid]) for sid in sorted(self._screens)]

    def coverage_report(self, element_ids: Iterable[str]) -> CoverageReport:
        """Report every id that does not resolve, once, so no unknown stays silent."""
        distinct = set(element_ids)
        unknown = tuple(sorted(eid for eid in distinct if eid not in self._by_id))
        return CoverageReport(total_distinct=len(distinct), unknown=unknown)


def _match_rank(element: UiElement, query: str, needle: str) -> int | None:
    if element.element_id == query:
        return RANK_EXACT_ID
    if element.label.lower().startswith(needle):
        return RANK_LABEL_PREFIX
    for text in (element.label, element.app, element.function):
        if needle in text.lower():
            return RANK_SUBSTRING
    return None


def _element_from_obj(obj: object, line_no: int) -> UiElement:
    if not isinstance(obj, dict):
        raise CatalogError(f"catalog line {line_no} is not an object")
    try:
        element_id = obj["element_id"]
        label = obj["label"]
        app = obj["app"]
        screen_id = obj["screen_id"]
        function = obj["function"]
        interactive = obj["interactive"]
    except KeyError as exc:
        raise CatalogError(f"catalog line {line_no} misses field {exc.args[0]!r}", detail=exc.args[0]) from exc
    leads = obj.get("leads_to_screen")
    for name, value in (("element_id", element_id), ("label", label), ("app", app),
                        ("screen_id", screen_id), ("function", function)):
        if not isinstance(value, str) or not value:
            raise CatalogError(f"catalog line {line_no}: {name} must be a non-empty string", detail=name)
    if not isinstance(interactive, bool):
        raise CatalogError(f"catalog line {line_no}: interactive must be a boolean", detail="interactive")
    if leads is not None and (not isinstance(leads, str) or not leads):
        raise CatalogError(f"catalog line {line_no}: leads_to_screen must be a non-empty string", detail="leads_to_screen")
    return UiElement(
        element_id=element_id,
        label=label,
        app=app,
        screen_id=screen_id,
        function=function,
        interactive=interactive,
        leads_to_screen=leads,
    )


def element_to_obj(element: UiElement) -> dict:
    obj = {
        "element_id": element.element_id,
        "label": element.label,
        "app": element.app,
        "screen_id": element.screen_id,
        "function": element.function,
        "interactive": element.interactive,
    }
    if element.leads_to_screen is not None:
        obj["leads_to_screen"] = element.leads_to_screen
    return obj
