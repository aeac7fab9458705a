"""Permutations in one-line notation and the energy of a vertex assignment.

A permutation on ``n`` letters is a tuple ``p`` of length ``n`` with
``p[i]`` the image of ``i``. The metric throughout is the Cayley distance
(minimal number of transpositions), and the distinguished elements are the
identity and the full cycle ``i -> i - 1 (mod n)``.

Assigning a permutation to every vertex of a network gives it an energy:
each B half-edge charges the distance from its vertex's permutation to the
identity, each A half-edge the distance to the full cycle, and each bulk
edge the distance between its endpoints' permutations. Replica moments of
the network state are weighted sums over all such assignments, with the
energy appearing as a deficit in the exponent, so the low-energy
assignments dominate at large bond dimension.
"""

from __future__ import annotations

from itertools import permutations as _permutations
from typing import Iterator, Mapping

from .graphs import Bipartition, Graph

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def full_cycle(n: int) -> Perm:
    """The n-cycle sending each letter to its predecessor.

    >>> full_cycle(3)
    (2, 0, 1)
    >>> full_cycle(1)
    (0,)
    """
    return tuple((i - 1) % n for i in range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """Left-to-right action composition: ``compose(p, q)[i] == p[q[i]]``.

    >>> compose((1, 2, 0), (0, 2, 1))
    (1, 0, 2)
    """
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def cycle_count(p: Perm) -> int:
    seen = [False] * len(p)
    count = 0
    for start in range(len(p)):
        if seen[start]:
            continue
        count += 1
        i = start
        while not seen[i]:
            seen[i] = True
            i = p[i]
    return count


def cayley_distance(p: Perm, q: Perm | None = None) -> int:
    """Minimal number of transpositions taking ``q`` to ``p``.

    With one argument: the distance from the identity, i.e. ``n`` minus the
    number of cycles.

    >>> cayley_distance(full_cycle(4))
    3
    >>> cayley_distance((0, 1, 2), (0, 1, 2))
    0
    """
    if q is not None:
        p = compose(inverse(q), p)
    return len(p) - cycle_count(p)


def on_geodesic(a: Perm, p: Perm, b: Perm) -> bool:
    """True iff ``p`` lies on a Cayley geodesic from ``a`` to ``b``.

    The geodesics from the identity to the full cycle are counted by the
    Catalan numbers:

    >>> n = 4
    >>> sum(on_geodesic(identity(n), p, full_cycle(n)) for p in all_perms(n))
    14
    """
    return cayley_distance(p, a) + cayley_distance(b, p) == cayley_distance(b, a)


def all_perms(n: int) -> Iterator[Perm]:
    return _permutations(range(n))


def hamiltonian(g: Graph, p: Bipartition, assignment: Mapping[str, Perm]) -> int:
    """Energy of a full vertex assignment for the given boundary split.

    >>> from .graphs import single_vertex
    >>> g = single_vertex()
    >>> hamiltonian(g, g.bipartition(), {"v": identity(2)})
    1
    >>> hamiltonian(g, g.bipartition(), {"v": full_cycle(2)})
    1
    """
    some = next(iter(assignment.values()))
    gamma = full_cycle(len(some))
    total = 0
    for v in p.a:
        total += cayley_distance(gamma, assignment[v])
    for v in p.b:
        total += cayley_distance(assignment[v])
    for u, w in g.bulk_edges:
        total += cayley_distance(assignment[u], assignment[w])
    return total


def normalization_hamiltonian(g: Graph, assignment: Mapping[str, Perm]) -> int:
    """Energy with every half-edge charged toward the identity.

    This is the energy governing the state's norm rather than a subsystem
    moment; its minimum is zero, attained by the all-identity assignment,
    and that minimizer is unique whenever the boundary is nonempty.
    """
    total = 0
    for v, _side in g.half_edges:
        total += cayley_distance(assignment[v])
    for u, w in g.bulk_edges:
        total += cayley_distance(assignment[u], assignment[w])
    return total
