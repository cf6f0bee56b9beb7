from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowboat.catalog import ConceptCatalog
from flowboat.errors import CatalogError

from conftest import TEST_ELEMENTS


class TestLoad:
    def test_load_counts_valid_entries(self, catalog_file):
        catalog = ConceptCatalog()
        assert catalog.load_file(catalog_file) == len(TEST_ELEMENTS)
        assert len(catalog) == len(TEST_ELEMENTS)

    def test_duplicate_id_is_fatal_and_names_the_id(self, tmp_path):
        entry = {"element_id": "nav.search", "label": "x", "app": "a", "screen_id": "s",
                 "function": "f", "interactive": True}
        path = tmp_path / "cat.jsonl"
        path.write_text(json.dumps(entry) + "\n" + json.dumps(entry) + "\n", encoding="utf-8")
        with pytest.raises(CatalogError, match="nav.search"):
            ConceptCatalog().load_file(path)

    def test_dangling_screen_reference_is_fatal(self, tmp_path):
        entry = {"element_id": "a.b", "label": "x", "app": "a", "screen_id": "s1",
                 "function": "f", "interactive": True, "leads_to_screen": "S9"}
        path = tmp_path / "cat.jsonl"
        path.write_text(json.dumps(entry) + "\n", encoding="utf-8")
        with pytest.raises(CatalogError, match="S9"):
            ConceptCatalog().load_file(path)

    def test_failed_load_keeps_previous_catalog(self, catalog_file, tmp_path):
        catalog = ConceptCatalog()
        catalog.load_file(catalog_file)
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{broken\n", encoding="utf-8")
        with pytest.raises(CatalogError):
            catalog.load_file(bad)
        assert len(catalog) == len(TEST_ELEMENTS)

    def test_missing_field_is_fatal(self, tmp_path):
        path = tmp_path / "cat.jsonl"
        path.write_text(json.dumps({"element_id": "a.b", "label": "x"}) + "\n", encoding="utf-8")
        with pytest.raises(CatalogError, match="app"):
            ConceptCatalog().load_file(path)


class TestSearch:
    def test_exact_id_ranks_first(self, catalog):
        results = catalog.search("nav.search")
        assert results and results[0].element_id == "nav.search"

    def test_label_prefix_tie_broken_by_element_id(self, catalog):
        results = catalog.search("clim")
        # both climate labels match by prefix; clim.fan sorts before clim.home
        assert [e.element_id for e in results[:2]] == ["clim.fan", "clim.home"]

    def test_no_match_is_empty(self, catalog):
        assert catalog.search("zzz") == []

    def test_empty_query_is_empty(self, catalog):
        assert catalog.search("") == []

    def test_substring_matches_label_app_and_function(self, catalog):
        ids = {e.element_id for e in catalog.search("playback")}
        assert "media.play" in ids  # via function text

    def test_limit_caps_results(self, catalog):
        assert len(catalog.search("nav", limit=2)) == 2

    def test_search_is_stable(self, catalog):
        a = [e.element_id for e in catalog.search("nav")]
        b = [e.element_id for e in catalog.search("nav")]
        assert a == b

    def test_every_search_hit_resolves(self, catalog):
        for query in ("nav", "clim", "result", "nav.search", "guidance"):
            for element in catalog.search(query):
                assert catalog.resolve(element.element_id) is element


class TestResolve:
    def test_resolve_present(self, catalog):
        element = catalog.resolve("nav.home")
        assert element is not None and element.label == "Navigation"

    def test_resolve_absent_is_none(self, catalog):
        assert catalog.resolve("ghost.btn") is None


class TestCoverage:
    def test_unknown_ids_reported_once(self, catalog):
        report = catalog.coverage_report(["nav.home", "ghost.btn", "ghost.btn", "nav.search"])
        assert report.total_distinct == 3
        assert report.unknown == ("ghost.btn",)
        assert report.resolved == 2

    def test_full_coverage(self, catalog):
        report = catalog.coverage_report(e.element_id for e in TEST_ELEMENTS)
        assert report.unknown == ()


class TestScreens:
    def test_screens_group_elements(self, catalog):
        by_id = {s.screen_id: s for s in catalog.screens()}
        assert {e.element_id for e in by_id["home"].elements} == {"nav.home", "clim.home", "media.play"}
        assert all(by_id[s].elements for s in by_id)


@given(st.text(min_size=1, max_size=12))
@settings(max_examples=80, deadline=None)
def test_search_never_crashes_and_is_stable(query):
    catalog = ConceptCatalog(TEST_ELEMENTS)
    first = [e.element_id for e in catalog.search(query)]
    second = [e.element_id for e in catalog.search(query)]
    assert first == second
    assert len(first) <= 20
