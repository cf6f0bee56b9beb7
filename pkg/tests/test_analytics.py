from __future__ import annotations

import math
import random
from itertools import combinations_with_replacement, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowboat.analytics import (
    boxplot_stats,
    build_sankey,
    compute_metric,
    defined_metrics,
    group_flows,
    apply_filter,
    metric_distribution,
    sequence_detail,
    top_flows,
)
from flowboat.catalog import ConceptCatalog
from flowboat.errors import EmptySelectionError, UnknownFlowError, UnknownMetricError
from flowboat.extraction import attach_context_from
from flowboat.models import FilterSpec, InteractionSequence

from conftest import TEST_ELEMENTS, make_event, make_glance, make_signal
from oracles import check_sankey_balance, naive_sankey_counts, oracle_boxplot


def make_sequence(
    path,
    status="completed",
    seq_id="seq-x",
    ts0=10_000,
    step=1_000,
    software="1.0.0",
    model="sedan",
    glances=(),
    signals=(),
    attach=True,
):
    events = tuple(
        make_event(ts0 + i * step, el, software=software, model=model) for i, el in enumerate(path)
    )
    sequence = InteractionSequence(
        sequence_id=seq_id,
        task_id="task-1",
        vehicle_id="v1",
        session_id="s1",
        software_version=software,
        car_model=model,
        events=events,
        status=status,
    )
    if attach:
        sequence = attach_context_from(sequence, glances, signals)
    return sequence


class TestGroupFlows:
    def test_groups_by_identical_path(self):
        sequences = [
            make_sequence(["S", "E"], seq_id="a"),
            make_sequence(["S", "E"], seq_id="b"),
            make_sequence(["S", "B", "E"], seq_id="c"),
        ]
        flows = group_flows(sequences)
        assert [(f.path, f.count) for f in flows] == [(("S", "E"), 2), (("S", "B", "E"), 1)]

    def test_status_is_part_of_flow_identity(self):
        sequences = [
            make_sequence(["S", "E"], status="completed", seq_id="a"),
            make_sequence(["S", "E"], status="aborted_gap", seq_id="b"),
        ]
        flows = group_flows(sequences)
        assert len(flows) == 2
        assert {f.status for f in flows} == {"completed", "aborted"}

    def test_empty_input(self):
        assert group_flows([]) == []

    def test_descending_count_ties_by_flow_id(self):
        sequences = [make_sequence([el], status="aborted_gap", seq_id=f"q{i}{el}") for el in "XY" for i in range(2)]
        flows = group_flows(sequences)
        assert [f.count for f in flows] == [2, 2]
        assert [f.flow_id for f in flows] == sorted(f.flow_id for f in flows)

    @given(st.lists(st.tuples(st.sampled_from(["SE", "SBE", "SB", "S"]), st.booleans()), max_size=40))
    @settings(max_examples=60, deadline=None)
    def test_partition_property(self, rows):
        sequences = [
            make_sequence(list(path), status="completed" if done else "aborted_gap", seq_id=f"s{i}", attach=False)
            for i, (path, done) in enumerate(rows)
        ]
        flows = group_flows(sequences)
        assert sum(f.count for f in flows) == len(sequences)
        seen = [sid for f in flows for sid in f.sequence_ids]
        assert sorted(seen) == sorted(s.sequence_id for s in sequences)


class TestSankey:
    def test_two_branch_example(self):
        flows = group_flows(
            [make_sequence(["S", "B", "E"], seq_id=f"b{i}") for i in range(3)]
            + [make_sequence(["S", "C", "E"], seq_id=f"c{i}") for i in range(2)]
        )
        graph = build_sankey(flows)
        nodes = {(n.depth, n.element_id): n.count for n in graph.nodes}
        edges = {(e.depth, e.source, e.target): e.count for e in graph.edges}
        assert nodes[(0, "S")] == 5
        assert edges[(0, "S", "B")] == 3
        assert edges[(0, "S", "C")] == 2
        assert edges[(1, "B", "E")] == 3
        assert edges[(1, "C", "E")] == 2
        assert edges[(2, "E", "END")] == 5
        assert graph.total_sequences == 5
        assert check_sankey_balance(graph) == []

    def test_single_aborted_flow(self):
        flows = group_flows([make_sequence(["S"], status="aborted_gap", seq_id=f"a{i}") for i in range(4)])
        graph = build_sankey(flows)
        assert [(n.depth, n.element_id, n.count) for n in graph.nodes] == [(0, "S", 4)]
        assert [(e.depth, e.source, e.target, e.count) for e in graph.edges] == [(0, "S", "ABORT", 4)]

    def test_empty_flow_list(self):
        graph = build_sankey([])
        assert graph.total_sequences == 0
        assert graph.nodes == () and graph.edges == ()

    def test_matches_naive_per_sequence_counts(self):
        rng = random.Random(5)
        paths = [("S",), ("S", "A"), ("S", "A", "E"), ("S", "B", "E"), ("S", "B", "A", "E")]
        sequences = []
        for i in range(120):
            path = rng.choice(paths)
            status = "completed" if path[-1] == "E" else "aborted_gap"
            sequences.append(make_sequence(list(path), status=status, seq_id=f"s{i}", attach=False))
        graph = build_sankey(group_flows(sequences))
        want_nodes, want_edges = naive_sankey_counts(
            [(s.path, s.coarse_status) for s in sequences]
        )
        assert {(n.depth, n.element_id): n.count for n in graph.nodes} == dict(want_nodes)
        assert {(e.depth, e.source, e.target): e.count for e in graph.edges} == dict(want_edges)

    @given(
        st.lists(
            st.tuples(
                st.lists(st.sampled_from("ABC"), min_size=0, max_size=4),
                st.booleans(),
            ),
            max_size=30,
        )
    )
    @settings(max_examples=120, deadline=None)
    def test_conservation_on_random_flow_sets(self, rows):
        sequences = [
            make_sequence(
                ["S"] + tail, status="completed" if done else "aborted_gap", seq_id=f"s{i}", attach=False
            )
            for i, (tail, done) in enumerate(rows)
        ]
        graph = build_sankey(group_flows(sequences))
        assert check_sankey_balance(graph) == []
        assert graph.total_sequences == len(sequences)

    def test_top_n_is_rank_stable(self):
        rng = random.Random(11)
        sequences = []
        for i in range(60):
            tail = rng.choice([[], ["A"], ["A", "E"], ["B", "E"]])
            status = "completed" if tail[-1:] == ["E"] else "aborted_gap"
            sequences.append(make_sequence(["S"] + tail, status=status, seq_id=f"s{i}", attach=False))
        flows = group_flows(sequences)
        for n in range(1, len(flows)):
            smaller = {f.flow_id for f in top_flows(flows, n)}
            larger = {f.flow_id for f in top_flows(flows, n + 1)}
            assert smaller <= larger


class TestMetrics:
    def test_time_on_task(self):
        sequence = make_sequence(["S", "E"], ts0=1_000, step=3_000)
        assert compute_metric(sequence, "time_on_task_ms") == 3_000.0

    def test_glance_metrics_from_clipped_glances(self):
        sequence = make_sequence(
            ["S", "B", "E"], ts0=500, step=2_000,
            glances=[make_glance(1_000, 2_000), make_glance(3_000, 3_500)],
        )
        assert compute_metric(sequence, "tgd_ms") == 1_500.0
        assert compute_metric(sequence, "mgd_ms") == 750.0
        assert compute_metric(sequence, "n_glances") == 2.0

    def test_glance_metrics_undefined_without_any_glance_data(self):
        sequence = make_sequence(["S", "E"])
        assert compute_metric(sequence, "tgd_ms") is None
        assert compute_metric(sequence, "mgd_ms") is None
        assert compute_metric(sequence, "n_glances") is None

    def test_mgd_undefined_with_zero_matching_glances(self):
        sequence = make_sequence(["S", "E"], ts0=1_000, step=1_000, glances=[make_glance(1_100, 1_400, aoi="road")])
        assert compute_metric(sequence, "tgd_ms") == 0.0
        assert compute_metric(sequence, "n_glances") == 0.0
        assert compute_metric(sequence, "mgd_ms") is None

    def test_mean_speed_trapezoid(self):
        sequence = make_sequence(
            ["S", "E"], ts0=1_000, step=1_000,
            signals=[make_signal(1_000, 10.0), make_signal(2_000, 20.0)],
        )
        assert compute_metric(sequence, "mean_speed_mps") == pytest.approx(15.0)

    def test_mean_speed_weights_by_time(self):
        # 10 m/s for the first quarter, then linear 10 -> 30 over the rest
        sequence = make_sequence(
            ["S", "E"], ts0=0, step=4_000,
            signals=[make_signal(0, 10.0), make_signal(1_000, 10.0), make_signal(4_000, 30.0)],
        )
        expected = (10.0 * 1_000 + (10.0 + 30.0) / 2 * 3_000) / 4_000
        assert compute_metric(sequence, "mean_speed_mps") == pytest.approx(expected)

    def test_mean_speed_undefined_without_samples(self):
        sequence = make_sequence(["S", "E"])
        assert compute_metric(sequence, "mean_speed_mps") is None

    def test_unknown_metric_errors(self):
        with pytest.raises(UnknownMetricError):
            compute_metric(make_sequence(["S", "E"]), "laneDeviation")

    def test_context_required_for_glance_metrics(self):
        sequence = make_sequence(["S", "E"], attach=False)
        with pytest.raises(ValueError):
            compute_metric(sequence, "tgd_ms")

    def test_n_interactions_and_purity(self):
        sequence = make_sequence(["S", "B", "E"])
        before = sequence.events
        assert compute_metric(sequence, "n_interactions") == 3.0
        assert sequence.events == before

    @given(st.data())
    @settings(max_examples=100, deadline=None)
    def test_tgd_never_exceeds_time_on_task(self, data):
        span_len = data.draw(st.integers(0, 500))
        glances = []
        t = data.draw(st.integers(0, 100))
        for _ in range(data.draw(st.integers(0, 8))):
            t += data.draw(st.integers(1, 50))
            end = t + data.draw(st.integers(1, 120))
            glances.append(make_glance(t, end))
            t = end
        sequence = make_sequence(["S", "E"] if span_len else ["S"], ts0=50, step=span_len or 1,
                                 glances=glances)
        tgd = compute_metric(sequence, "tgd_ms")
        if tgd is not None:
            assert tgd <= compute_metric(sequence, "time_on_task_ms")
        n = compute_metric(sequence, "n_glances")
        mgd = compute_metric(sequence, "mgd_ms")
        if mgd is not None:
            assert math.isclose(mgd * n, tgd, rel_tol=1e-9)


class TestBoxplot:
    # frozen expected values, computed with the order-statistics oracle
    def test_five_values(self):
        stats = boxplot_stats([1, 2, 3, 4, 5])
        assert (stats.median, stats.q1, stats.q3) == (3.0, 2.0, 4.0)
        assert (stats.whisker_low, stats.whisker_high) == (1.0, 5.0)
        assert stats.outliers == ()

    def test_single_value(self):
        stats = boxplot_stats([7])
        assert (stats.median, stats.q1, stats.q3, stats.whisker_low, stats.whisker_high) == (7.0,) * 5
        assert stats.outliers == ()

    def test_zero_iqr_outlier(self):
        stats = boxplot_stats([1, 1, 1, 1, 100])
        assert (stats.median, stats.q1, stats.q3) == (1.0, 1.0, 1.0)
        assert (stats.whisker_low, stats.whisker_high) == (1.0, 1.0)
        assert stats.outliers == (100.0,)

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            boxplot_stats([])

    def test_matches_oracle_on_small_multisets(self):
        for n in range(1, 7):
            for values in combinations_with_replacement(range(6), n):
                stats = boxplot_stats(values)
                med, q1, q3, wl, wh, outliers = oracle_boxplot(values)
                got = (stats.median, stats.q1, stats.q3, stats.whisker_low, stats.whisker_high, list(stats.outliers))
                assert got == (med, q1, q3, wl, wh, outliers), values

    def test_permutation_invariance_exhaustive_short_lists(self):
        for n in range(1, 5):
            for values in product(range(4), repeat=n):
                assert boxplot_stats(list(values)) == boxplot_stats(sorted(values))

    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=60))
    @settings(max_examples=120, deadline=None)
    def test_invariants_on_random_values(self, values):
        stats = boxplot_stats(values)
        assert stats.q1 <= stats.median <= stats.q3
        assert stats.whisker_low <= stats.q1
        assert stats.whisker_high >= stats.q3
        for v in values:
            inside = stats.whisker_low <= v <= stats.whisker_high
            assert inside or float(v) in stats.outliers


class TestFilter:
    def _mixed(self):
        return [
            make_sequence(["S", "E"], seq_id="a", software="1.0.0", model="modelX", attach=False),
            make_sequence(["S", "E"], seq_id="b", software="1.1.0", model="modelX", attach=False, status="aborted_gap"),
            make_sequence(["S", "E"], seq_id="c", software="1.1.0", model="modelY", attach=False),
        ]

    def test_empty_filter_is_identity(self):
        sequences = self._mixed()
        assert apply_filter(sequences, FilterSpec()) == sequences
        assert apply_filter(sequences, None) == sequences

    def test_car_model_filter(self):
        kept = apply_filter(self._mixed(), FilterSpec(car_models=frozenset({"modelX"})))
        assert [s.sequence_id for s in kept] == ["a", "b"]

    def test_conjunction(self):
        spec = FilterSpec(car_models=frozenset({"modelX"}), statuses=frozenset({"completed"}))
        kept = apply_filter(self._mixed(), spec)
        assert [s.sequence_id for s in kept] == ["a"]

    def test_time_range(self):
        sequences = [
            make_sequence(["S", "E"], seq_id="early", ts0=1_000, attach=False),
            make_sequence(["S", "E"], seq_id="late", ts0=9_000, attach=False),
        ]
        kept = apply_filter(sequences, FilterSpec(time_range=(0, 5_000)))
        assert [s.sequence_id for s in kept] == ["early"]

    def test_idempotence_and_monotonicity(self):
        rng = random.Random(3)
        sequences = [
            make_sequence(
                ["S", "E"],
                seq_id=f"s{i}",
                software=rng.choice(["1.0.0", "1.1.0"]),
                model=rng.choice(["modelX", "modelY"]),
                status=rng.choice(["completed", "aborted_gap"]),
                attach=False,
            )
            for i in range(40)
        ]
        weaker = FilterSpec(car_models=frozenset({"modelX", "modelY"}))
        stricter = FilterSpec(car_models=frozenset({"modelX"}), statuses=frozenset({"completed"}))
        once = apply_filter(sequences, stricter)
        assert apply_filter(once, stricter) == once
        assert len(once) <= len(apply_filter(sequences, weaker))

    def test_top_n_validation(self):
        with pytest.raises(ValueError):
            FilterSpec(top_n_flows=0)


class TestDistribution:
    def _flow_setup(self):
        sequences = [
            make_sequence(["S", "E"], seq_id="a", ts0=1_000, step=3_000),
            make_sequence(["S", "E"], seq_id="b", ts0=1_000, step=5_000),
        ]
        flows = group_flows(sequences)
        return flows, {s.sequence_id: s for s in sequences}

    def test_two_point_median(self):
        flows, by_id = self._flow_setup()
        dist = metric_distribution(flows, "time_on_task_ms", by_id)
        entry = dist.flows[0]
        assert len(entry.points) == 2
        assert entry.stats.median == 4_000.0  # oracle: median of {3000, 5000}

    def test_undefined_values_yield_no_stats(self):
        flows, by_id = self._flow_setup()
        dist = metric_distribution(flows, "mgd_ms", by_id)
        entry = dist.flows[0]
        assert entry.points == ()
        assert entry.stats is None

    def test_point_count_bounded_by_flow_count(self):
        flows, by_id = self._flow_setup()
        for metric in ("time_on_task_ms", "n_interactions", "tgd_ms"):
            dist = metric_distribution(flows, metric, by_id)
            for entry, flow in zip(dist.flows, flows):
                assert len(entry.points) <= flow.count

    def test_unknown_flow_errors(self):
        flows, by_id = self._flow_setup()
        with pytest.raises(UnknownFlowError):
            metric_distribution(flows, "time_on_task_ms", by_id, flow_ids=["flow-nope"])

    def test_unknown_metric_errors(self):
        flows, by_id = self._flow_setup()
        with pytest.raises(UnknownMetricError):
            metric_distribution(flows, "nope", by_id)

    def test_empty_selection_errors(self):
        with pytest.raises(EmptySelectionError):
            metric_distribution([], "time_on_task_ms", {})

    def test_flow_selection_keeps_rank_order(self):
        sequences = (
            [make_sequence(["S", "E"], seq_id=f"a{i}") for i in range(3)]
            + [make_sequence(["S", "B", "E"], seq_id=f"b{i}") for i in range(2)]
        )
        flows = group_flows(sequences)
        by_id = {s.sequence_id: s for s in sequences}
        picked = [flows[1].flow_id, flows[0].flow_id]
        dist = metric_distribution(flows, "n_interactions", by_id, flow_ids=picked)
        assert [f.flow_id for f in dist.flows] == [flows[0].flow_id, flows[1].flow_id]


class TestSequenceDetail:
    def _sequence(self):
        return make_sequence(
            ["nav.home", "nav.route_started"],
            ts0=10_000,
            step=2_000,
            glances=[make_glance(9_000, 11_000)],
            signals=[make_signal(ts, 5.0, steering=1.0) for ts in range(5_000, 18_000, 1_000)],
        )

    def test_markers_rebased_to_first_event(self):
        detail = sequence_detail(self._sequence())
        assert [m.t_ms for m in detail.markers] == [0, 2_000]

    def test_marker_count_equals_event_count(self):
        sequence = self._sequence()
        detail = sequence_detail(sequence)
        assert len(detail.markers) == len(sequence.events)

    def test_speed_trace_covers_padding(self):
        detail = sequence_detail(self._sequence())
        assert detail.speed_trace[0].t_ms == -5_000
        assert detail.speed_trace[-1].t_ms <= detail.duration_ms + 5_000

    def test_labels_resolved_with_unknowns_flagged(self):
        catalog = ConceptCatalog(TEST_ELEMENTS)
        sequence = make_sequence(["nav.home", "ghost.btn"], status="aborted_gap")
        detail = sequence_detail(sequence, catalog)
        assert detail.markers[0].label == "Navigation" and detail.markers[0].known
        assert detail.markers[1].label == "ghost.btn" and not detail.markers[1].known

    def test_summary_metrics_are_the_defined_ones(self):
        detail = sequence_detail(self._sequence())
        assert detail.metrics == defined_metrics(self._sequence())
        assert "time_on_task_ms" in detail.metrics
        assert "mean_speed_mps" in detail.metrics

    def test_requires_attached_context(self):
        with pytest.raises(ValueError):
            sequence_detail(make_sequence(["S", "E"], attach=False))
