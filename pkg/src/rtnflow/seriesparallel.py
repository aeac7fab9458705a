"""Series-parallel reduction of the cluster order into a limit measure.

Every covering relation of the order starts as an edge carrying the unit
measure. Two rewrite rules shrink the digraph:

* parallel: edges with the same endpoints merge, classically convolving
  their measures;
* series: an interior node with exactly one edge in and one edge out is
  spliced away, freely convolving the incoming measure, one Marchenko-
  Pastur factor for the node itself, and the outgoing measure.

If the digraph shrinks to the single edge source -> sink, its measure is
the limiting entanglement spectrum. If the rules stall earlier the order
is not series-parallel; that is a legitimate outcome, reported as
:class:`NotSeriesParallel` so callers can fall back to the exact
finite-dimension route.
"""

from __future__ import annotations

from dataclasses import dataclass

from .flow import Cut, FlowResult, OrderDag, max_flow, min_cut, partial_order
from .freeprob import MP, Expr, class_conv, free_conv, One
from .graphs import Bipartition, FlowNetwork, Graph, build_flow_network


@dataclass(frozen=True)
class NotSeriesParallel:
    """Remnant of a stalled reduction, kept for diagnostics."""

    reason: str
    nodes: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[int, int], ...]


def reduce_order(dag: OrderDag) -> Expr | NotSeriesParallel:
    edges: dict[int, tuple[int, int, Expr]] = {
        i: (u, v, One()) for i, (u, v) in enumerate(dag.edges)
    }
    next_id = len(edges)
    changed = True
    while changed:
        changed = False
        # parallel merges first so series nodes are recognized by degree
        groups: dict[tuple[int, int], list[int]] = {}
        for eid, (u, v, _) in edges.items():
            groups.setdefault((u, v), []).append(eid)
        for (u, v), eids in groups.items():
            if len(eids) > 1:
                merged = class_conv(*(edges[eid][2] for eid in sorted(eids)))
                for eid in eids:
                    del edges[eid]
                edges[next_id] = (u, v, merged)
                next_id += 1
                changed = True
        incoming: dict[int, list[int]] = {}
        outgoing: dict[int, list[int]] = {}
        for eid, (u, v, _) in edges.items():
            outgoing.setdefault(u, []).append(eid)
            incoming.setdefault(v, []).append(eid)
        for node in range(len(dag.nodes)):
            if node in (dag.source, dag.sink):
                continue
            if len(incoming.get(node, ())) == 1 and len(outgoing.get(node, ())) == 1:
                (ein,) = incoming[node]
                (eout,) = outgoing[node]
                u, _, before = edges[ein]
                _, v, after = edges[eout]
                del edges[ein]
                del edges[eout]
                edges[next_id] = (u, v, free_conv(before, MP(), after))
                next_id += 1
                changed = True
                break
    if len(edges) == 1:
        ((u, v, expr),) = edges.values()
        if (u, v) == (dag.source, dag.sink):
            return expr
    remaining = tuple(sorted((u, v) for u, v, _ in edges.values()))
    live = sorted({n for pair in remaining for n in pair} | {dag.source, dag.sink})
    return NotSeriesParallel(
        "order does not reduce to a single source-sink edge",
        tuple(dag.nodes[i] for i in live),
        remaining,
    )


@dataclass(frozen=True)
class Analysis:
    """Everything the flow pipeline derives from one network."""

    network: FlowNetwork
    flow: FlowResult
    cut: Cut
    order: OrderDag
    measure: Expr | NotSeriesParallel


def analyze(g: Graph, p: Bipartition | None = None) -> Analysis:
    net = build_flow_network(g, p)
    result = max_flow(net)
    cut = min_cut(net, result)
    dag = partial_order(net, result)
    return Analysis(net, result, cut, dag, reduce_order(dag))
