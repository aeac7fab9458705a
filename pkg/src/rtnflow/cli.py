"""Command line interface.

Five subcommands, all emitting JSON on stdout:

* ``analyze``: flow, cut, cluster order, and limit measure of a network,
  with the enumeration cross-check run at every replica order that fits
  the budget. Deterministic.
* ``oracle``: the exact replica moment polynomial by brute enumeration.
* ``moments``: exact moments and S-transform of a measure expression.
* ``sample-measure``: random matrix draws of a measure expression against
  its exact moments.
* ``simulate``: Monte Carlo network states at a given bond dimension.

Invariant violations between independent routes (flow vs enumeration vs
measure moments) raise AssertionError and crash the process; anything
expected to go wrong operationally (bad file, bad expression, budget)
prints an error and exits 1. Exit status 0 means no invariant fired.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import BudgetExceeded
from .freeprob import (
    MeasureFormatError,
    moments,
    parse_measure,
    render,
    renyi_correction,
    s_series,
    sample_spectrum,
    vn_correction,
)
from .graphs import Graph, GraphFormatError, ValidationError, check_valid, parse_graph
from .oracle import (
    DEFAULT_BUDGET,
    backend_name,
    limit_moment,
    moment_polynomial,
    normalization_polynomial,
)
from .seriesparallel import NotSeriesParallel, analyze
from .simulate import DEFAULT_ENTRIES, empirical_report


def _load_graph(path: str) -> tuple[Graph, str]:
    with open(path, "rb") as fh:
        raw = fh.read()
    g = parse_graph(raw.decode("utf-8"))
    check_valid(g)
    return g, hashlib.sha256(raw).hexdigest()


def _header(command: str, source: str, digest: str) -> dict:
    return {
        "tool": "rtnflow",
        "version": __version__,
        "command": command,
        "input": source,
        "input_sha256": digest,
    }


def _states(g: Graph, n: int) -> int:
    return math.factorial(n) ** len(g.vertices)


def cmd_analyze(args: argparse.Namespace) -> dict:
    g, digest = _load_graph(args.graph)
    result = analyze(g)
    out = _header("analyze", args.graph, digest)
    out["backend"] = backend_name()
    out["flow_value"] = result.flow.value
    out["cut_edges"] = [list(result.network.edges[i]) for i in result.cut.edges]
    out["order"] = {
        "nodes": [list(c) for c in result.order.nodes],
        "edges": [list(e) for e in result.order.edges],
        "source": result.order.source,
        "sink": result.order.sink,
    }
    sp = not isinstance(result.measure, NotSeriesParallel)
    out["series_parallel"] = sp
    if sp:
        out["measure"] = render(result.measure)
        mom = moments(result.measure, max(args.n_max, 1))
        out["moments"] = {str(k + 1): str(m) for k, m in enumerate(mom)}
        try:
            out["vn_correction"] = str(vn_correction(result.measure))
        except ValueError:
            out["vn_correction"] = None
    else:
        out["measure"] = None
        out["not_series_parallel"] = result.measure.reason

    checked = []
    for n in range(2, args.n_max + 1):
        if _states(g, n) > args.budget:
            continue
        count = limit_moment(g, None, n, args.budget)
        if sp:
            expected = moments(result.measure, n)[n - 1]
            assert count == expected, (
                f"enumeration limit moment {count} at n={n} disagrees with "
                f"measure moment {expected}"
            )
        checked.append(n)
    out["checked_replicas"] = checked
    return out


def cmd_oracle(args: argparse.Namespace) -> dict:
    g, digest = _load_graph(args.graph)
    poly = moment_polynomial(g, n=args.n, budget=args.budget)
    count = limit_moment(g, n=args.n, budget=args.budget)
    norm = normalization_polynomial(g, n=args.n, budget=args.budget)
    out = _header("oracle", args.graph, digest)
    out["backend"] = backend_name()
    out["n"] = args.n
    out["offset"] = poly.offset
    out["histogram"] = [list(item) for item in poly.histogram]
    out["min_energy"] = poly.min_energy
    out["limit_moment"] = count
    out["normalization_histogram"] = [list(item) for item in norm.histogram]
    if args.dimension is not None:
        out["dimension"] = args.dimension
        out["moment"] = str(poly.evaluate(args.dimension))
        out["moment_normalized"] = str(poly.evaluate_normalized(args.dimension))
    return out


def cmd_moments(args: argparse.Namespace) -> dict:
    expr = parse_measure(args.expression)
    digest = hashlib.sha256(args.expression.encode("utf-8")).hexdigest()
    out = _header("moments", args.expression, digest)
    out["canonical"] = render(expr)
    mom = moments(expr, args.n_max)
    out["moments"] = {str(k + 1): str(m) for k, m in enumerate(mom)}
    out["s_series"] = [str(c) for c in s_series(expr, args.n_max)]
    try:
        out["vn_correction"] = str(vn_correction(expr))
    except ValueError:
        out["vn_correction"] = None
    out["renyi_corrections"] = {
        str(n): renyi_correction(expr, n) for n in range(2, args.n_max + 1)
    }
    return out


def cmd_sample_measure(args: argparse.Namespace) -> dict:
    expr = parse_measure(args.expression)
    digest = hashlib.sha256(args.expression.encode("utf-8")).hexdigest()
    lam = sample_spectrum(expr, args.size, args.samples, args.seed)
    pooled = lam.ravel()
    out = _header("sample-measure", args.expression, digest)
    out["canonical"] = render(expr)
    out["seed"] = args.seed
    out["size"] = args.size
    out["samples"] = args.samples
    exact = moments(expr, args.n_max)
    out["moments_exact"] = {str(k + 1): str(m) for k, m in enumerate(exact)}
    out["moments_empirical"] = {
        str(k): float(np.mean(pooled**k)) for k in range(1, args.n_max + 1)
    }
    counts, edges = np.histogram(pooled, bins=args.bins)
    out["histogram"] = {"edges": edges.tolist(), "counts": counts.tolist()}
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample", "eigenvalue"])
            for i in range(lam.shape[0]):
                for value in lam[i]:
                    writer.writerow([i, repr(float(value))])
        out["csv"] = args.csv
    return out


def cmd_simulate(args: argparse.Namespace) -> dict:
    g, digest = _load_graph(args.graph)
    report = empirical_report(
        g, args.dimension, args.samples, args.seed, budget=args.budget
    )
    out = _header("simulate", args.graph, digest)
    out["seed"] = args.seed
    out["dimension"] = report.dim
    out["samples"] = report.samples
    out["boundary_size"] = report.boundary_size
    out["flow_value"] = report.flow_value
    out["rank_bound"] = report.rank_bound
    out["rank_leak"] = report.rank_leak
    out["trace_mean"] = report.trace_mean
    out["trace_std"] = report.trace_std
    out["entropy_mean"] = report.entropy_mean
    out["entropy_normalized_mean"] = report.entropy_normalized_mean
    out["page_gap"] = report.page_gap
    scaled = report.spectra * float(args.dimension) ** report.flow_value
    counts, edges = np.histogram(scaled.ravel(), bins=args.bins)
    out["histogram_scaled"] = {"edges": edges.tolist(), "counts": counts.tolist()}

    traces = report.spectra.sum(axis=1)
    second = (report.spectra**2).sum(axis=1)
    if _states(g, 2) <= DEFAULT_BUDGET:
        exact = float(moment_polynomial(g, n=2).evaluate_normalized(args.dimension))
        se = float(second.std(ddof=1)) / math.sqrt(args.samples) if args.samples > 1 else 0.0
        out["moment2_exact"] = exact
        out["moment2_mc"] = float(second.mean())
        out["moment2_z"] = (float(second.mean()) - exact) / se if se else None
    if args.per_sample:
        out["per_sample"] = {
            "trace": traces.tolist(),
            "moment2": second.tolist(),
        }
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample", "index", "eigenvalue"])
            for i in range(report.spectra.shape[0]):
                for j, value in enumerate(report.spectra[i]):
                    writer.writerow([i, j, repr(float(value))])
        out["csv"] = args.csv
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rtnflow",
        description="entanglement spectra of random tensor networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="flow, cluster order, and limit measure")
    p.add_argument("graph")
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--budget", type=float, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", help="exact replica moment by enumeration")
    p.add_argument("graph")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--budget", type=float, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("moments", help="exact moments of a measure expression")
    p.add_argument("expression")
    p.add_argument("--n-max", type=int, default=8)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser(
        "sample-measure", help="matrix-model draws of a measure expression"
    )
    p.add_argument("expression")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_sample_measure)

    p = sub.add_parser("simulate", help="Monte Carlo network states")
    p.add_argument("graph")
    p.add_argument("--dimension", type=int, required=True)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--per-sample", action="store_true")
    p.add_argument("--csv", default=None)
    p.add_argument("--budget", type=int, default=DEFAULT_ENTRIES)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload = args.func(args)
    except (
        GraphFormatError,
        ValidationError,
        MeasureFormatError,
        BudgetExceeded,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
