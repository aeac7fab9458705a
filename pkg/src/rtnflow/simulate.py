"""Monte Carlo realization of network states at finite bond dimension.

Every vertex gets an iid complex Gaussian tensor (unit entry variance, one
leg of size D per incident edge end), bulk edges are contracted against
unit-norm maximally entangled pair states, and the result is the boundary
vector psi with one leg per half-edge in canonical order. The subsystem
operator rho_A is the A-side Gram matrix of psi; rescaling by D to the
boundary size gives the operator whose trace averages to one, and whose
eigenvalues, blown up by D to the flow value, follow the limit measure
computed by the series-parallel route. Nothing here reuses that route, so
matching statistics are evidence, not tautology.

Contraction order is chosen greedily (always the cheapest pair first) and
capped by an entry-count budget; network states are reproducible from
(seed, sample index) alone via Philox streams.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
from .flow import max_flow
from .graphs import Bipartition, Graph, build_flow_network, check_valid

DEFAULT_ENTRIES = 1 << 26


@dataclass(eq=False)
class TensorState:
    """One sampled network state as a boundary tensor.

    ``psi`` has one axis of length ``dim`` per half-edge, in the canonical
    half-edge order of ``graph``.
    """

    graph: Graph
    dim: int
    psi: np.ndarray


def _trace_self_loops(tensor: np.ndarray, labels: list) -> tuple[np.ndarray, list]:
    while True:
        seen: dict = {}
        dup = None
        for pos, lab in enumerate(labels):
            if lab in seen:
                dup = (seen[lab], pos)
                break
            seen[lab] = pos
        if dup is None:
            return tensor, labels
        i, j = dup
        tensor = np.trace(tensor, axis1=i, axis2=j)
        labels = [lab for pos, lab in enumerate(labels) if pos not in (i, j)]


def sample_state(
    g: Graph,
    dim: int,
    seed: int = 0,
    sample_index: int = 0,
    budget: int = DEFAULT_ENTRIES,
) -> TensorState:
    check_valid(g)
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=[seed, sample_index]))
    tensors: list[tuple[np.ndarray, list]] = []
    for v in g.vertices:
        labels: list = []
        for idx, (x, y) in enumerate(g.bulk_edges):
            if x == v:
                labels.append(("e", idx))
            if y == v:
                labels.append(("e", idx))
        for idx, (x, _side) in enumerate(g.half_edges):
            if x == v:
                labels.append(("h", idx))
        if dim ** len(labels) > budget:
            raise BudgetExceeded(
                f"tensor at {v} needs {dim ** len(labels)} entries",
                dim ** len(labels),
                budget,
            )
        shape = (dim,) * len(labels)
        tensor = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)
        tensors.append(_trace_self_loops(tensor, labels))

    while len(tensors) > 1:
        best = None
        for i in range(len(tensors)):
            for j in range(i + 1, len(tensors)):
                shared = set(tensors[i][1]) & set(tensors[j][1])
                if not shared:
                    continue
                out_legs = len(tensors[i][1]) + len(tensors[j][1]) - 2 * len(shared)
                if best is None or dim**out_legs < best[0]:
                    best = (dim**out_legs, i, j, shared)
        assert best is not None, "bulk graph is not connected"
        size, i, j, shared = best
        if size > budget:
            raise BudgetExceeded(
                f"intermediate tensor needs {size} entries", size, budget
            )
        t_i, lab_i = tensors[i]
        t_j, lab_j = tensors[j]
        order = sorted(shared)
        merged = np.tensordot(
            t_i, t_j, axes=([lab_i.index(s) for s in order], [lab_j.index(s) for s in order])
        )
        new_labels = [lab for lab in lab_i if lab not in shared]
        new_labels += [lab for lab in lab_j if lab not in shared]
        tensors[i] = (merged, new_labels)
        del tensors[j]

    tensor, labels = tensors[0]
    perm = sorted(range(len(labels)), key=lambda pos: labels[pos])
    psi = np.transpose(tensor, perm) * dim ** (-len(g.bulk_edges) / 2)
    return TensorState(g, dim, psi)


def reduced_density(state: TensorState, p: Bipartition | None = None) -> np.ndarray:
    """Unnormalized rho_A: Gram matrix of psi matricized with A as rows.

    When a vertex carries several half-edges and the bipartition does not
    pin them individually, its earliest half-edge slots go to side A; the
    slots are exchangeable, so any other convention gives the same
    distribution.
    """
    g = state.graph
    if p is None:
        p = g.bipartition()
    if not p.matches(g):
        raise ValueError("bipartition does not match the graph's half-edges")
    remaining = Counter(p.a)
    a_axes, b_axes = [], []
    for idx, (v, _side) in enumerate(g.half_edges):
        if remaining[v] > 0:
            remaining[v] -= 1
            a_axes.append(idx)
        else:
            b_axes.append(idx)
    mat = np.transpose(state.psi, a_axes + b_axes).reshape(
        state.dim ** len(a_axes), -1
    )
    return mat @ mat.conj().T


def spectrum(rho: np.ndarray) -> np.ndarray:
    """Eigenvalues of a positive semidefinite Hermitian matrix, descending.

    Checks Hermiticity to 1e-10 relative, clamps roundoff negatives within
    1e-10 of zero (relative to the largest eigenvalue), and verifies the
    eigenvalue sum against the trace to 1e-8 relative.
    """
    scale = float(np.max(np.abs(rho))) or 1.0
    if float(np.max(np.abs(rho - rho.conj().T))) > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian")
    vals = np.linalg.eigvalsh(rho)[::-1].copy()
    top = float(vals[0]) if vals.size else 0.0
    if top and float(vals[-1]) < -1e-10 * top:
        raise ValueError("matrix has a significantly negative eigenvalue")
    trace = float(np.trace(rho).real)
    if abs(float(vals.sum()) - trace) > 1e-8 * max(abs(trace), 1.0):
        raise ValueError("eigenvalue sum disagrees with the trace")
    return np.clip(vals, 0.0, None)


def simulate_spectra(
    g: Graph,
    dim: int,
    samples: int = 1,
    seed: int = 0,
    p: Bipartition | None = None,
    budget: int = DEFAULT_ENTRIES,
) -> np.ndarray:
    """Eigenvalues of rho_A / D**boundary, shape (samples, D**a), descending rows."""
    if p is None:
        p = g.bipartition()
    a_len = len(p.a)
    out = np.empty((samples, dim**a_len))
    for i in range(samples):
        state = sample_state(g, dim, seed, i, budget)
        out[i] = spectrum(reduced_density(state, p)) / float(dim) ** g.boundary_size()
    return out


@dataclass(eq=False)
class SimulationReport:
    dim: int
    samples: int
    boundary_size: int
    flow_value: int
    rank_bound: int
    trace_mean: float
    trace_std: float
    entropy_mean: float
    entropy_normalized_mean: float
    page_gap: float
    rank_leak: float
    spectra: np.ndarray


def empirical_report(
    g: Graph,
    dim: int,
    samples: int,
    seed: int = 0,
    p: Bipartition | None = None,
    budget: int = DEFAULT_ENTRIES,
) -> SimulationReport:
    """Summary statistics of a batch of sampled spectra.

    ``page_gap`` is (flow value) * log D minus the mean entropy of the
    rescaled operator; it converges to the t log t integral of the limit
    measure. ``rank_leak`` is the largest eigenvalue found beyond the
    D**flow rank bound, relative to the top eigenvalue.
    """
    if p is None:
        p = g.bipartition()
    value = max_flow(build_flow_network(g, p)).value
    spectra = simulate_spectra(g, dim, samples, seed, p, budget)
    traces = spectra.sum(axis=1)

    def entropy(rows: np.ndarray) -> np.ndarray:
        safe = np.where(rows > 0, rows, 1.0)
        return -(np.where(rows > 0, rows * np.log(safe), 0.0)).sum(axis=1)

    ent = entropy(spectra)
    ent_norm = entropy(spectra / traces[:, None])
    rank_bound = dim**value
    if spectra.shape[1] > rank_bound:
        rank_leak = float(np.max(spectra[:, rank_bound] / spectra[:, 0]))
    else:
        rank_leak = 0.0
    return SimulationReport(
        dim=dim,
        samples=samples,
        boundary_size=g.boundary_size(),
        flow_value=value,
        rank_bound=rank_bound,
        trace_mean=float(traces.mean()),
        trace_std=float(traces.std(ddof=1)) if samples > 1 else 0.0,
        entropy_mean=float(ent.mean()),
        entropy_normalized_mean=float(ent_norm.mean()),
        page_gap=value * math.log(dim) - float(ent.mean()),
        rank_leak=rank_leak,
        spectra=spectra,
    )
