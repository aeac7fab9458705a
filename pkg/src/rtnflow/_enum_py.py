"""Pure Python twin of the compiled enumeration kernel.

Must stay behaviorally identical to ``_enum_core.pyx``; the test suite
runs both on the same inputs and compares. Selected at import time by
:mod:`rtnflow.oracle` when the extension is unavailable or when
``RTNFLOW_PURE=1`` is set.
"""

from __future__ import annotations


def histogram_kernel(bw, edges, pair, hist_len):
    """Count energy values over all digit states of the odometer.

    ``bw[v][p]`` is the boundary energy of vertex v in state p, ``pair``
    the symmetric state-distance table charged by each edge, ``edges``
    loop-free vertex index pairs. Returns a list ``hist`` with ``hist[H]``
    the number of full assignments of energy H.

    The walk visits all ``P**V`` states in mixed-radix order and keeps the
    energy current by applying one single-digit delta per carry step.
    """
    weights = [list(map(int, row)) for row in bw]
    table = [list(map(int, row)) for row in pair]
    num_vertices = len(weights)
    num_states = len(weights[0])
    adjacent: list[list[int]] = [[] for _ in range(num_vertices)]
    for x, y in edges:
        adjacent[int(x)].append(int(y))
        adjacent[int(y)].append(int(x))
    digits = [0] * num_vertices
    energy = sum(row[0] for row in weights)
    hist = [0] * int(hist_len)
    while True:
        hist[energy] += 1
        v = 0
        while v < num_vertices:
            old = digits[v]
            new = old + 1
            if new == num_states:
                new = 0
            delta = weights[v][new] - weights[v][old]
            if adjacent[v]:
                row_new = table[new]
                row_old = table[old]
                for w in adjacent[v]:
                    delta += row_new[digits[w]] - row_old[digits[w]]
            digits[v] = new
            energy += delta
            if new:
                break
            v += 1
        if v == num_vertices:
            return hist
