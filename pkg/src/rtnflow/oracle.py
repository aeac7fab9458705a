"""Exact finite-dimension replica moments by exhausting all assignments.

For bond dimension D, the n-th replica moment of the (unnormalized)
subsystem density operator is a Laurent polynomial in D: every assignment
of a permutation to every vertex contributes D to the power (n times the
boundary size) minus its energy. Enumerating all (n!)**V assignments and
histogramming the energy therefore gives the moment exactly, for every D
at once. That is this module's oracle role: it never looks at the flow
routing, so agreement between its minimal energy and the flow value, or
between its leading count and the limit measure's moment, is a real check
and is asserted, not assumed.

The inner loop lives in a small kernel, compiled when available
(``rtnflow._enum_core``) with a pure Python twin (``rtnflow._enum_py``).
Set ``RTNFLOW_PURE=1`` to force the pure one.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded
from .flow import max_flow
from .graphs import Bipartition, Graph, build_flow_network, check_valid
from .perms import all_perms, cayley_distance, compose, full_cycle, inverse

if os.environ.get("RTNFLOW_PURE") == "1":
    from . import _enum_py as _kernel
else:
    try:
        from . import _enum_core as _kernel  # type: ignore[no-redef]
    except ImportError:
        from . import _enum_py as _kernel  # type: ignore[no-redef]

DEFAULT_BUDGET = 200_000_000


def backend_name() -> str:
    return "compiled" if _kernel.__name__.endswith("_enum_core") else "pure"


@dataclass(frozen=True)
class MomentPolynomial:
    """Exact replica moment as a function of the bond dimension.

    ``histogram`` pairs each energy H with the number of assignments
    attaining it; the moment is sum count * D**(offset - H) with
    ``offset`` = n * boundary size.
    """

    n: int
    offset: int
    histogram: tuple[tuple[int, int], ...]

    def evaluate(self, dim: int) -> Fraction:
        """E[Tr rho_A**n] at bond dimension ``dim``."""
        if dim < 1:
            raise ValueError("dim must be >= 1")
        d = Fraction(dim)
        return sum(
            (count * d ** (self.offset - h) for h, count in self.histogram),
            Fraction(0),
        )

    def evaluate_normalized(self, dim: int) -> Fraction:
        """Moment of the rescaled operator rho_A / D**boundary."""
        return self.evaluate(dim) / Fraction(dim) ** self.offset

    @property
    def min_energy(self) -> int:
        return self.histogram[0][0]

    @property
    def minimizer_count(self) -> int:
        return self.histogram[0][1]


def hamiltonian_histogram(
    g: Graph, p: Bipartition, n: int, budget: float = DEFAULT_BUDGET
) -> dict[int, int]:
    """Exhaustive energy histogram over all (n!)**V assignments."""
    check_valid(g)
    if not p.matches(g):
        raise ValueError("bipartition does not match the graph's half-edges")
    if n < 1:
        raise ValueError("n must be >= 1")
    states = math.factorial(n) ** len(g.vertices)
    if states > budget:
        raise BudgetExceeded(
            f"{states} assignments exceed the budget of {budget:g}", states, budget
        )
    loop_free = [e for e in g.bulk_edges if e[0] != e[1]]
    if loop_free and n > 7:
        raise BudgetExceeded(
            "pairwise distance table is infeasible beyond n = 7", states, budget
        )

    perms = list(all_perms(n))
    count = len(perms)
    gamma = full_cycle(n)
    dist_id = [cayley_distance(q) for q in perms]
    dist_gamma = [cayley_distance(q, gamma) for q in perms]
    in_a = Counter(p.a)
    in_b = Counter(p.b)
    index = {v: i for i, v in enumerate(g.vertices)}
    bw = np.array(
        [
            [in_a[v] * dist_gamma[i] + in_b[v] * dist_id[i] for i in range(count)]
            for v in g.vertices
        ],
        dtype=np.int64,
    )
    edges = np.array(
        [(index[u], index[w]) for u, w in loop_free], dtype=np.int64
    ).reshape(-1, 2)
    if loop_free:
        pair = np.zeros((count, count), dtype=np.int64)
        for i, q in enumerate(perms):
            q_inv = inverse(q)
            for j in range(i + 1, count):
                d = cayley_distance(compose(q_inv, perms[j]))
                pair[i, j] = d
                pair[j, i] = d
    else:
        pair = np.zeros((1, 1), dtype=np.int64)
    hist_len = int(bw.max(axis=1).sum()) + int(len(loop_free)) * (n - 1) + 1
    hist = _kernel.histogram_kernel(bw, edges, pair, hist_len)
    return {h: c for h, c in enumerate(hist) if c}


def moment_polynomial(
    g: Graph,
    p: Bipartition | None = None,
    n: int = 2,
    budget: float = DEFAULT_BUDGET,
) -> MomentPolynomial:
    if p is None:
        p = g.bipartition()
    hist = hamiltonian_histogram(g, p, n, budget)
    return MomentPolynomial(
        n, n * g.boundary_size(), tuple(sorted(hist.items()))
    )


def normalization_polynomial(
    g: Graph, n: int = 2, budget: float = DEFAULT_BUDGET
) -> MomentPolynomial:
    """Replica moments of the full trace: every half-edge charged to B."""
    p = Bipartition.build(a=(), b=[v for v, _ in g.half_edges])
    hist = hamiltonian_histogram(g, p, n, budget)
    return MomentPolynomial(
        n, n * g.boundary_size(), tuple(sorted(hist.items()))
    )


def min_hamiltonian_bruteforce(
    g: Graph,
    p: Bipartition | None = None,
    n: int = 2,
    budget: float = DEFAULT_BUDGET,
) -> tuple[int, int]:
    """(minimal energy, number of minimizers), by sheer enumeration."""
    poly = moment_polynomial(g, p, n, budget)
    return poly.min_energy, poly.minimizer_count


def limit_moment(
    g: Graph,
    p: Bipartition | None = None,
    n: int = 2,
    budget: float = DEFAULT_BUDGET,
) -> int:
    """n-th moment of the limiting spectral measure, from enumeration.

    Equals the number of minimal-energy assignments. The minimal energy
    itself must match (n - 1) times the max flow computed by the routing
    side of the package; the assertion here is the cross-check between the
    two independent routes and must never be removed.
    """
    if p is None:
        p = g.bipartition()
    poly = moment_polynomial(g, p, n, budget)
    value = max_flow(build_flow_network(g, p)).value
    assert poly.min_energy == (n - 1) * value, (
        f"enumeration minimum {poly.min_energy} disagrees with "
        f"(n-1) * maxflow = {(n - 1) * value}"
    )
    return poly.minimizer_count
