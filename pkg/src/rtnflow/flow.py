"""Maximal flow through a network and the order it induces on clusters.

All edges have unit capacity, so a maximal flow is a largest family of
edge-disjoint source-to-sink paths. The search is Edmonds-Karp with a
fixed tie-break (neighbors in canonical node order, then edge index), so
results are deterministic functions of the input.

After the flow is found, deleting the flow-carrying edges splits the
network into residual clusters. Each flow path visits a sequence of
clusters, and the consecutive visits, accumulated over a canonical path
decomposition, generate a partial order on clusters: merge any directed
cycles, drop relations implied by transitivity, and what remains is the
covering digraph of the order, with multiplicities counting how many paths
step directly between two clusters. That digraph is the input to the
series-parallel reduction.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass

from .graphs import FlowNetwork, node_key


@dataclass(frozen=True)
class FlowResult:
    """A maximal flow, both as signed per-edge values and as paths.

    ``flow[i]`` is +1, 0 or -1 along the stored orientation of edge ``i``.
    ``paths`` are node sequences from source to sink, ``path_edges`` the
    matching edge indices, and the two views agree: the paths are
    edge-disjoint and ``used_edges`` is exactly the set of edges with
    nonzero flow.
    """

    value: int
    flow: tuple[int, ...]
    paths: tuple[tuple[str, ...], ...]
    path_edges: tuple[tuple[int, ...], ...]
    used_edges: tuple[int, ...]


@dataclass(frozen=True)
class Cut:
    value: int
    edges: tuple[int, ...]
    reachable: tuple[str, ...]


@dataclass(frozen=True)
class OrderDag:
    """Covering digraph of the cluster order.

    ``nodes`` are clusters (tuples of network node names), ``edges`` the
    covering relations as index pairs with multiplicity, and ``source`` and
    ``sink`` the indices of the terminal clusters.
    """

    nodes: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[int, int], ...]
    source: int
    sink: int


def _adjacency(net: FlowNetwork) -> dict[str, list[tuple[int, str, int]]]:
    adj: dict[str, list[tuple[int, str, int]]] = {v: [] for v in net.nodes}
    for idx, (u, w) in enumerate(net.edges):
        adj[u].append((idx, w, +1))
        adj[w].append((idx, u, -1))
    for v in adj:
        adj[v].sort(key=lambda arc: (node_key(arc[1]), arc[0], arc[2]))
    return adj


def _augmenting_path(net, adj, flow):
    """Shortest residual path as a parent map, or None if none exists.

    An edge is traversable forward while its flow is <= 0 and backward
    while it is >= 0; unit capacity throughout.
    """
    parent: dict[str, tuple[int, str, int] | None] = {net.source: None}
    queue = deque([net.source])
    while queue:
        x = queue.popleft()
        for idx, other, direction in adj[x]:
            if other in parent:
                continue
            if direction > 0 and flow[idx] > 0:
                continue
            if direction < 0 and flow[idx] < 0:
                continue
            parent[other] = (idx, x, direction)
            if other == net.sink:
                return parent
            queue.append(other)
    return None


def max_flow(net: FlowNetwork) -> FlowResult:
    adj = _adjacency(net)
    flow = [0] * len(net.edges)
    while True:
        parent = _augmenting_path(net, adj, flow)
        if parent is None:
            break
        x = net.sink
        while x != net.source:
            idx, prev, direction = parent[x]
            flow[idx] += direction
            x = prev
    paths, path_edges = _decompose(net, flow)

    # Re-derive the per-edge flow from the extracted paths. This discards
    # any closed circulation the augmenting steps may have left behind, so
    # the three views (value, paths, signed flow) always agree.
    clean = [0] * len(net.edges)
    for nodes_seq, edges_seq in zip(paths, path_edges):
        for i, idx in enumerate(edges_seq):
            u, w = net.edges[idx]
            clean[idx] += 1 if (nodes_seq[i], nodes_seq[i + 1]) == (u, w) else -1
    assert all(f in (-1, 0, 1) for f in clean)
    used = tuple(sorted({idx for seq in path_edges for idx in seq}))
    return FlowResult(len(paths), tuple(clean), paths, path_edges, used)


def _decompose(net, flow):
    """Split a flow into edge-disjoint source-to-sink walks.

    Walks are grown greedily, always leaving a node through the smallest
    remaining arc in canonical order; any loop the walk closes is erased
    from the path and its arcs dropped.
    """
    out: dict[str, list[tuple[tuple, int, str]]] = {v: [] for v in net.nodes}
    for idx, (u, w) in enumerate(net.edges):
        if flow[idx] > 0:
            out[u].append((node_key(w), idx, w))
        elif flow[idx] < 0:
            out[w].append((node_key(u), idx, u))
    for v in out:
        out[v].sort()
    paths: list[tuple[str, ...]] = []
    path_edges: list[tuple[int, ...]] = []
    for _ in range(len(out[net.source])):
        nodes = [net.source]
        edges: list[int] = []
        pos = {net.source: 0}
        x = net.source
        while x != net.sink:
            _, idx, nxt = out[x].pop(0)
            if nxt in pos:
                k = pos[nxt]
                for dropped in nodes[k + 1 :]:
                    del pos[dropped]
                del nodes[k + 1 :]
                del edges[k:]
            else:
                nodes.append(nxt)
                edges.append(idx)
                pos[nxt] = len(nodes) - 1
            x = nxt
        paths.append(tuple(nodes))
        path_edges.append(tuple(edges))
    return tuple(paths), tuple(path_edges)


def min_cut(net: FlowNetwork, result: FlowResult) -> Cut:
    """Certificate cut: edges leaving the residually reachable side.

    Its size always equals the flow value; the function asserts both that
    and the absence of a leftover augmenting path.
    """
    adj = _adjacency(net)
    seen = {net.source}
    queue = deque([net.source])
    while queue:
        x = queue.popleft()
        for idx, other, direction in adj[x]:
            if other in seen:
                continue
            if direction > 0 and result.flow[idx] > 0:
                continue
            if direction < 0 and result.flow[idx] < 0:
                continue
            seen.add(other)
            queue.append(other)
    assert net.sink not in seen, "flow is not maximal"
    cut_edges = tuple(
        idx for idx, (u, w) in enumerate(net.edges) if (u in seen) != (w in seen)
    )
    assert len(cut_edges) == result.value, "cut size differs from flow value"
    return Cut(len(cut_edges), cut_edges, tuple(sorted(seen, key=node_key)))


def residual_clusters(net: FlowNetwork, result: FlowResult) -> tuple[tuple[str, ...], ...]:
    """Connected components after deleting the flow-carrying edges.

    Terminals participate: unused terminal edges keep their vertex attached
    to the source or sink cluster. The source and sink always land in
    different clusters, else the flow would not be maximal.
    """
    used = set(result.used_edges)
    parent = {v: v for v in net.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx, (u, w) in enumerate(net.edges):
        if idx not in used:
            parent[find(u)] = find(w)
    groups: dict[str, list[str]] = {}
    for v in net.nodes:
        groups.setdefault(find(v), []).append(v)
    clusters = sorted(
        (tuple(sorted(g, key=node_key)) for g in groups.values()),
        key=lambda c: node_key(c[0]),
    )
    assert find(net.source) != find(net.sink), "source and sink share a cluster"
    return tuple(clusters)


def partial_order(net: FlowNetwork, result: FlowResult) -> OrderDag:
    clusters = residual_clusters(net, result)
    where = {v: i for i, c in enumerate(clusters) for v in c}
    relations: list[tuple[int, int]] = []
    for nodes_seq in result.paths:
        seq = [where[v] for v in nodes_seq]
        collapsed = [seq[0]]
        for c in seq[1:]:
            if c != collapsed[-1]:
                collapsed.append(c)
        relations.extend(zip(collapsed, collapsed[1:]))

    comp = _strongly_connected(len(clusters), sorted(set(relations)))
    members: dict[int, list[str]] = {}
    for i, cluster in enumerate(clusters):
        members.setdefault(comp[i], []).extend(cluster)
    order = sorted(members, key=lambda cid: min(node_key(v) for v in members[cid]))
    remap = {cid: j for j, cid in enumerate(order)}
    nodes = tuple(tuple(sorted(members[cid], key=node_key)) for cid in order)
    merged = [
        (remap[comp[u]], remap[comp[v]]) for u, v in relations if comp[u] != comp[v]
    ]
    edges = tuple(sorted(_transitive_reduction(len(nodes), merged)))
    return OrderDag(
        nodes, edges, remap[comp[where[net.source]]], remap[comp[where[net.sink]]]
    )


def _strongly_connected(n: int, pairs: list[tuple[int, int]]) -> list[int]:
    """Component id per node (iterative Kosaraju)."""
    out: list[list[int]] = [[] for _ in range(n)]
    rev: list[list[int]] = [[] for _ in range(n)]
    for u, v in pairs:
        out[u].append(v)
        rev[v].append(u)
    finish: list[int] = []
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack = [(start, iter(out[start]))]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append((nxt, iter(out[nxt])))
                    advanced = True
                    break
            if not advanced:
                finish.append(node)
                stack.pop()
    comp = [-1] * n
    current = 0
    for start in reversed(finish):
        if comp[start] != -1:
            continue
        comp[start] = current
        stack = [start]
        while stack:
            x = stack.pop()
            for y in rev[x]:
                if comp[y] == -1:
                    comp[y] = current
                    stack.append(y)
        current += 1
    return comp


def _transitive_reduction(n: int, pairs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Keep only covering relations; preserve their multiplicity.

    A pair (u, v) is implied, and dropped with all its copies, when some
    other out-neighbor of u reaches v. Input must be a DAG.
    """
    mult = Counter(pairs)
    out: dict[int, set[int]] = {u: set() for u in range(n)}
    for u, v in mult:
        out[u].add(v)
    reach: dict[int, set[int]] = {}

    def reach_of(w: int) -> set[int]:
        if w not in reach:
            seen = {w}
            stack = [w]
            while stack:
                x = stack.pop()
                for y in out[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            reach[w] = seen
        return reach[w]

    kept: list[tuple[int, int]] = []
    for (u, v), m in sorted(mult.items()):
        if not any(w != v and v in reach_of(w) for w in out[u]):
            kept.extend([(u, v)] * m)
    return kept
