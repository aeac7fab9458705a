"""Reduction of cluster orders to measures, on hand-built and real orders."""

from __future__ import annotations

import pytest

from rtnflow.flow import OrderDag
from rtnflow.freeprob import (
    MP,
    One,
    canonicalize,
    class_conv,
    free_conv,
    parse_measure,
    render,
)
from rtnflow.graphs import (
    Graph,
    demo_graph,
    lattice,
    series_chain,
    single_vertex,
)
from rtnflow.seriesparallel import NotSeriesParallel, analyze, reduce_order


def dag(n, edges, source=0, sink=None):
    nodes = tuple((f"k{i}",) for i in range(n))
    return OrderDag(nodes, tuple(sorted(edges)), source, n - 1 if sink is None else sink)


def test_single_interior_node_gives_mp():
    assert reduce_order(dag(3, [(0, 1), (1, 2)])) == MP()


def test_chain_of_joins_gives_box_powers():
    measure = reduce_order(dag(4, [(0, 1), (1, 2), (2, 3)]))
    assert measure == free_conv(MP(), MP())
    measure = reduce_order(dag(5, [(0, 1), (1, 2), (2, 3), (3, 4)]))
    assert measure == free_conv(MP(), MP(), MP())


def test_direct_source_sink_edge_is_unit():
    assert reduce_order(dag(2, [(0, 1)])) == One()


def test_parallel_copies_collapse_to_unit():
    measure = reduce_order(dag(3, [(0, 1), (0, 1), (1, 2), (1, 2)]))
    assert measure == MP()


def test_parallel_branches_convolve_classically():
    # two disjoint interior chains from source to sink
    measure = reduce_order(dag(4, [(0, 1), (1, 3), (0, 2), (2, 3)], sink=3))
    assert measure == class_conv(MP(), MP())


def test_branch_and_rejoin_mixes_both_products():
    # source -> a -> sink and source -> b -> c -> sink
    edges = [(0, 1), (1, 4), (0, 2), (2, 3), (3, 4)]
    measure = reduce_order(dag(5, edges, sink=4))
    assert measure == class_conv(MP(), free_conv(MP(), MP()))


def test_bridge_order_is_not_series_parallel():
    # the classic N: source -> a -> sink, source -> b -> sink, a -> b
    edges = [(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)]
    result = reduce_order(dag(4, edges, sink=3))
    assert isinstance(result, NotSeriesParallel)
    assert len(result.edges) == 5
    assert "reduce" in result.reason


def test_no_edges_is_not_series_parallel():
    result = reduce_order(dag(2, []))
    assert isinstance(result, NotSeriesParallel)


def test_bundled_network_measures():
    cases = [
        (single_vertex(), "mp"),
        (series_chain(2), "pow_box(mp, 2)"),
        (series_chain(3), "pow_box(mp, 3)"),
        (lattice(2, 3), "pow_box(mp, 3)"),
        (lattice(3, 2), "pow_box(mp, 2)"),
    ]
    for g, expected in cases:
        assert render(analyze(g).measure) == expected, g


DEMO_MEASURE = (
    "box(times(box(pow_box(mp,3),times(pow_box(mp,2),mp)),"
    "box(times(mp,mp),mp)),pow_box(mp,2))"
)


def test_demo_measure_is_the_frozen_expression():
    result = analyze(demo_graph())
    assert result.flow.value == 4
    assert canonicalize(result.measure) == parse_measure(DEMO_MEASURE)


def test_adjacent_terminal_clusters_give_unit_measure():
    g = Graph.build(["x"], [], [("x", "A"), ("x", "B"), ("x", "B")])
    result = analyze(g)
    assert result.flow.value == 1
    assert result.measure == One()


def test_zero_flow_reports_not_series_parallel():
    g = Graph.build(["x"], [], [("x", "B"), ("x", "B")])
    result = analyze(g)
    assert result.flow.value == 0
    assert isinstance(result.measure, NotSeriesParallel)


def test_wide_chain_multiplicities_do_not_change_the_measure():
    for rows in (1, 2, 3):
        g = lattice(rows, 4)
        assert render(analyze(g).measure) == "pow_box(mp, 4)"


@pytest.mark.parametrize("length", range(1, 6))
def test_chain_join_count_matches_length(length):
    measure = analyze(series_chain(length)).measure
    assert measure == free_conv(*(MP() for _ in range(length)))
