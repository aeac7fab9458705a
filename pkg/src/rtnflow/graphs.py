"""Boundary-decorated multigraphs and their two-terminal flow networks.

A network here is an undirected multigraph whose vertices carry tensors.
Edges come in two kinds: bulk edges joining two vertices (self-loops
allowed), and half-edges that dangle from a single vertex and form the
boundary. Each half-edge is labelled ``A`` or ``B``, splitting the boundary
into the subsystem of interest and its complement.

Text format, one declaration per line, ``#`` starts a comment::

    vertex <id>
    edge <id> <id>
    half <id> <A|B>

Vertex ids are opaque non-empty strings without whitespace; ids starting
with ``@`` are reserved for the flow-network terminals. A vertex must be
declared before any edge or half line mentions it, which keeps error
messages precise. Serialization is canonical (vertices, then edges, then
half-edges, each sorted), so parse/serialize round-trips byte for byte on
canonical input.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

SOURCE = "@source"
SINK = "@sink"

SIDES = ("A", "B")


class GraphFormatError(ValueError):
    """Malformed graph text. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ValueError):
    """A Graph value violates a structural invariant."""


@dataclass(frozen=True)
class Graph:
    """Immutable multigraph with labelled boundary half-edges.

    ``bulk_edges`` is a sorted tuple of sorted vertex pairs, ``half_edges``
    a sorted tuple of ``(vertex, side)`` pairs with side in ``{"A", "B"}``.
    Multiplicity is significant in both. Use :meth:`build` rather than the
    raw constructor so the canonical ordering holds.
    """

    vertices: tuple[str, ...]
    bulk_edges: tuple[tuple[str, str], ...]
    half_edges: tuple[tuple[str, str], ...]

    @staticmethod
    def build(
        vertices: object,
        bulk_edges: object = (),
        half_edges: object = (),
    ) -> "Graph":
        verts = tuple(sorted(str(v) for v in vertices))
        edges = tuple(sorted(tuple(sorted((str(u), str(v)))) for u, v in bulk_edges))
        halves = tuple(sorted((str(v), str(s)) for v, s in half_edges))
        return Graph(verts, edges, halves)

    def degree(self, v: str) -> int:
        """Number of tensor legs at ``v``; a self-loop contributes two."""
        d = sum((u == v) + (w == v) for u, w in self.bulk_edges)
        return d + sum(1 for x, _ in self.half_edges if x == v)

    def boundary_size(self) -> int:
        return len(self.half_edges)

    def bipartition(self) -> "Bipartition":
        a = [v for v, s in self.half_edges if s == "A"]
        b = [v for v, s in self.half_edges if s == "B"]
        return Bipartition(tuple(sorted(a)), tuple(sorted(b)))


@dataclass(frozen=True)
class Bipartition:
    """A split of the half-edge multiset into sides A and B.

    Stored as the multisets of carrying vertices, sorted. Usually derived
    from the graph's own labels via :meth:`Graph.bipartition`, but any
    relabelling of the same half-edge multiset is a valid bipartition of
    the same graph, which is how exhaustive sweeps over subsystem choices
    are expressed.
    """

    a: tuple[str, ...]
    b: tuple[str, ...]

    @staticmethod
    def build(a: object = (), b: object = ()) -> "Bipartition":
        return Bipartition(tuple(sorted(str(v) for v in a)), tuple(sorted(str(v) for v in b)))

    def matches(self, g: Graph) -> bool:
        """True iff this split uses exactly the graph's half-edge slots."""
        return Counter(self.a) + Counter(self.b) == Counter(v for v, _ in g.half_edges)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...]


def validate(g: Graph) -> ValidationReport:
    """Check the invariants any Graph value must satisfy.

    Endpoints declared, sides well formed, canonical ordering, no reserved
    ids, and the bulk edges connect all vertices (a single vertex counts as
    connected). Half-edges do not contribute to connectivity.
    """
    problems: list[str] = []
    vset = set(g.vertices)
    if len(vset) != len(g.vertices):
        problems.append("duplicate vertex id")
    if tuple(sorted(g.vertices)) != g.vertices:
        problems.append("vertices not in canonical order")
    for v in g.vertices:
        if not v or any(c.isspace() for c in v):
            problems.append(f"bad vertex id {v!r}")
        if v.startswith("@"):
            problems.append(f"vertex id {v!r} uses the reserved '@' prefix")
    for u, w in g.bulk_edges:
        if u not in vset or w not in vset:
            problems.append(f"edge ({u}, {w}) has an undeclared endpoint")
    if tuple(sorted(tuple(sorted(e)) for e in g.bulk_edges)) != g.bulk_edges:
        problems.append("bulk edges not in canonical order")
    for v, s in g.half_edges:
        if v not in vset:
            problems.append(f"half-edge on undeclared vertex {v}")
        if s not in SIDES:
            problems.append(f"half-edge side {s!r} is not A or B")
    if tuple(sorted(g.half_edges)) != g.half_edges:
        problems.append("half-edges not in canonical order")
    if not g.vertices:
        problems.append("graph has no vertices")
    elif not problems and not _bulk_connected(g):
        problems.append("bulk edges do not connect all vertices")
    return ValidationReport(not problems, tuple(problems))


def check_valid(g: Graph) -> None:
    report = validate(g)
    if not report.ok:
        raise ValidationError("; ".join(report.problems))


def _bulk_connected(g: Graph) -> bool:
    parent = {v: v for v in g.vertices}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, w in g.bulk_edges:
        parent[find(u)] = find(w)
    roots = {find(v) for v in g.vertices}
    return len(roots) <= 1


def parse_graph(text: str) -> Graph:
    """Parse the line format described in the module docstring.

    >>> g = parse_graph("vertex v\\nhalf v A\\nhalf v B\\n")
    >>> g.vertices, g.half_edges
    (('v',), (('v', 'A'), ('v', 'B')))
    """
    vertices: list[str] = []
    seen: set[str] = set()
    edges: list[tuple[str, str]] = []
    halves: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, args = tokens[0], tokens[1:]
        if kind == "vertex":
            if len(args) != 1:
                raise GraphFormatError("vertex takes exactly one id", lineno)
            (v,) = args
            if v.startswith("@"):
                raise GraphFormatError(f"vertex id {v!r} uses the reserved '@' prefix", lineno)
            if v in seen:
                raise GraphFormatError(f"vertex {v} declared twice", lineno)
            seen.add(v)
            vertices.append(v)
        elif kind == "edge":
            if len(args) != 2:
                raise GraphFormatError("edge takes exactly two vertex ids", lineno)
            u, w = args
            for x in (u, w):
                if x not in seen:
                    raise GraphFormatError(f"edge refers to undeclared vertex {x}", lineno)
            edges.append((u, w))
        elif kind == "half":
            if len(args) != 2:
                raise GraphFormatError("half takes a vertex id and a side", lineno)
            v, s = args
            if v not in seen:
                raise GraphFormatError(f"half-edge refers to undeclared vertex {v}", lineno)
            if s not in SIDES:
                raise GraphFormatError(f"half-edge side must be A or B, got {s!r}", lineno)
            halves.append((v, s))
        else:
            raise GraphFormatError(f"unknown declaration {kind!r}", lineno)
    return Graph.build(vertices, edges, halves)


def parse_graph_file(path: object) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def serialize_graph(g: Graph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {u} {w}" for u, w in g.bulk_edges]
    lines += [f"half {v} {s}" for v, s in g.half_edges]
    return "\n".join(lines) + "\n"


def node_key(name: str) -> tuple:
    """Canonical ordering key for flow-network nodes: source, vertices, sink."""
    if name == SOURCE:
        return (0,)
    if name == SINK:
        return (2,)
    return (1, name)


@dataclass(frozen=True)
class FlowNetwork:
    """Two-terminal network: bulk edges plus one terminal edge per half-edge.

    Side B half-edges attach their vertex to the source, side A to the sink,
    all with unit capacity. Edges keep their identity (index) because the
    network is a multigraph and downstream stages reason about which copies
    a flow uses.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    source: str = SOURCE
    sink: str = SINK


def build_flow_network(g: Graph, p: Bipartition | None = None) -> FlowNetwork:
    if p is None:
        p = g.bipartition()
    if not p.matches(g):
        raise ValidationError("bipartition does not match the graph's half-edge multiset")
    nodes = (SOURCE, *g.vertices, SINK)
    edges = list(g.bulk_edges)
    edges += [(SOURCE, v) for v in p.b]
    edges += [(v, SINK) for v in p.a]
    return FlowNetwork(nodes, tuple(edges))


# ---------------------------------------------------------------------------
# bundled network builders


def single_vertex() -> Graph:
    """One tensor with one A and one B leg; the smallest nontrivial network."""
    return Graph.build(["v"], [], [("v", "A"), ("v", "B")])


def series_chain(length: int) -> Graph:
    """A path of ``length`` tensors, B leg on one end, A leg on the other."""
    if length < 1:
        raise ValueError("length must be >= 1")
    names = [f"c{i:02d}" for i in range(1, length + 1)]
    edges = list(zip(names, names[1:]))
    halves = [(names[0], "B"), (names[-1], "A")]
    return Graph.build(names, edges, halves)


def lattice(rows: int, cols: int) -> Graph:
    """A rows x cols grid; every left-column tensor gets a B leg, every
    right-column tensor an A leg."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    name = lambda i, j: f"r{i}c{j}"
    vertices = [name(i, j) for i in range(1, rows + 1) for j in range(1, cols + 1)]
    edges = []
    for i in range(1, rows + 1):
        for j in range(1, cols + 1):
            if j < cols:
                edges.append((name(i, j), name(i, j + 1)))
            if i < rows:
                edges.append((name(i, j), name(i + 1, j)))
    halves = [(name(i, 1), "B") for i in range(1, rows + 1)]
    halves += [(name(i, cols), "A") for i in range(1, rows + 1)]
    return Graph.build(vertices, edges, halves)


def demo_graph() -> Graph:
    """The 17-tensor showcase network.

    Ten boundary legs (five per side), max flow 4 with the bottleneck in the
    interior, and a residual structure whose cluster order decomposes into a
    nested series-parallel shape. Bundled as graphs/demo17.graph.
    """
    v = {i: f"v{i:02d}" for i in range(1, 18)}
    edges = [
        (v[1], v[15]),
        (v[1], v[2]),
        (v[1], v[2]),
        (v[2], v[3]),
        (v[3], v[4]),
        (v[4], v[13]),
        (v[6], v[13]),
        (v[6], v[13]),
        (v[6], v[10]),
        (v[2], v[5]),
        (v[5], v[6]),
        (v[10], v[13]),
        (v[10], v[11]),
        (v[10], v[11]),
        (v[11], v[14]),
        (v[7], v[9]),
        (v[9], v[10]),
        (v[8], v[9]),
        (v[5], v[12]),
        (v[8], v[16]),
        (v[9], v[17]),
    ]
    halves = [
        (v[1], "B"),
        (v[7], "B"),
        (v[8], "B"),
        (v[15], "B"),
        (v[15], "B"),
        (v[9], "A"),
        (v[10], "A"),
        (v[11], "A"),
        (v[14], "A"),
        (v[14], "A"),
    ]
    return Graph.build(v.values(), edges, halves)
