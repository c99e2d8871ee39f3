"""Command-line front end.

Exit codes: 0 success, 2 a success assertion failed, 3 input error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .graphs import (
    FAMILIES,
    EdgeListFormatError,
    Graph,
    GraphParameterError,
    GraphSpec,
    build_graph,
    laplacian,
    parse_edge_list,
    parse_graph_spec,
)
from .report import to_csv, to_json
from .search import (
    MarkedSet,
    NonIntegralGraphError,
    SearchError,
    SearchParams,
    long_params,
    run_search,
    select_marked,
)
from .spectral import (
    IntegralityRejection,
    IntegralSpectrum,
    analytic_spectrum,
    certify_integral,
    depth,
    eigendecompose,
)
from .walk import PhaseEstimationConfig

EXIT_OK, EXIT_ASSERT, EXIT_INPUT = 0, 2, 3

SWEEP_COLUMNS = (
    "index", "graph", "mode", "N", "M", "epsilon", "k", "alpha", "s", "queries",
    "ctqw_calls", "T_prime", "d_L", "two_pow_dL", "success_probability",
    "ancilla_residue", "marked", "error",
)  # fmt: skip

COMPARE_COLUMNS = (
    "graph", "N", "M", "epsilon", "sqrt_N_over_M", "k", "ctqw_calls", "T_prime",
    "d_L", "two_pow_dL", "two_pow_dL_sqrt_N",
)  # fmt: skip

FAMILY_NOTES = {
    "Complete": "n >= 1",
    "Johnson": "1 <= k <= n",
    "Kneser": "1 <= k < n/2",
    "Hamming": "d >= 1, q >= 2",
    "Grassmann": "q prime, 1 <= k <= n",
    "Rook": "m, n >= 1",
    "CompleteSquare": "n >= 1",
    "CocktailParty": "n >= 1",
    "CompleteMultipartite": "k divides n",
    "Star": "n >= 1",
    "Antiregular": "N >= 2",
    "Custom": "edge-list file: header 'n <count>' then 'u v' lines",
}


class InputError(Exception):
    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.detail = detail or {}


# ---------------------------------------------------------------------------
# argument helpers


def resolve_graph(text: str) -> tuple[GraphSpec, Graph | None]:
    """A family spec like ``Johnson(4,2)``, ``Path(4)``, or an edge-list file path."""
    if os.path.isfile(text):
        with open(text) as fh:
            g = parse_edge_list(fh.read())
        return g.spec, g
    return parse_graph_spec(text), None


def _graph_info(spec: GraphSpec, n: int) -> dict:
    return {"n": n, **spec.as_dict()}


def parse_int_list(text: str) -> list[int]:
    """``2,4,8`` or ``4-12`` (inclusive) or a mix of both."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_params(text: str) -> SearchParams:
    """``epsilon=1/2`` derives k and alpha; ``k=..,alpha=..[,beta=..]`` sets them directly."""
    fields: dict[str, str] = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise InputError(f"--params entry {item!r} is not key=value")
        key, value = item.split("=", 1)
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {"epsilon", "k", "alpha", "beta"}
    if unknown:
        raise InputError(f"unknown --params keys: {sorted(unknown)}")
    try:
        if "k" in fields or "alpha" in fields:
            if not {"k", "alpha"} <= set(fields):
                raise InputError("--params needs both k and alpha when either is given")
            alpha = float(fields["alpha"])
            eps = Fraction(fields.get("epsilon", "0"))
            return SearchParams(eps, int(fields["k"]), alpha, float(fields.get("beta", alpha)))
        if "epsilon" in fields:
            return long_params(Fraction(fields["epsilon"]))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad --params value: {exc}") from None
    raise InputError("--params must give epsilon or k and alpha")


def marked_from_args(args: argparse.Namespace, n: int) -> MarkedSet:
    sources = [args.marked is not None, args.marked_count is not None]
    if sum(sources) != 1:
        raise InputError("give exactly one of --marked or --marked-count")
    if args.marked is not None:
        try:
            members = [int(v) for v in args.marked.split(",") if v.strip()]
        except ValueError:
            raise InputError(f"--marked must be a comma-separated vertex list, got {args.marked!r}")
        return MarkedSet(tuple(members), n)
    if args.seed is None:
        raise InputError("--marked-count requires --seed")
    return MarkedSet(select_marked(args.seed, n, args.marked_count), n)


def _config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_families(args: argparse.Namespace) -> int:
    rows = [(name, " ".join(params), FAMILY_NOTES[name]) for name, params in FAMILIES.items()]
    if args.format == "csv":
        _emit(args, to_csv(("family", "params", "constraints"), rows))
    else:
        _emit(
            args,
            to_json(
                {
                    "config": _config(args),
                    "families": [
                        {"family": f, "params": list(FAMILIES[f]), "constraints": c}
                        for f, _, c in rows
                    ],
                }
            ),
        )
    return EXIT_OK


def _load_spectrum(args: argparse.Namespace, text: str):
    spec, g = resolve_graph(text)
    g = g or build_graph(spec)
    sp = eigendecompose(laplacian(g), method=args.method)
    return spec, g, sp


def cmd_spectrum(args: argparse.Namespace) -> int:
    spec, g, sp = _load_spectrum(args, args.graph)
    cert = certify_integral(sp, args.int_tol)
    if args.format == "csv":
        _emit(args, to_csv(("index", "eigenvalue"), enumerate(sp.eigenvalues.tolist())))
        return EXIT_OK
    report = {
        "config": _config(args),
        "graph": _graph_info(spec, g.n_vertices),
        "spectrum": {
            "eigenvalues": sp.eigenvalues.tolist(),
            "integral": cert.integral,
            **({"certified": cert.as_dict()} if cert.integral else {"rejection": cert.as_dict()}),
        },
    }
    _emit(args, to_json(report))
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    spec, g, sp = _load_spectrum(args, args.graph)
    cert = certify_integral(sp, args.int_tol)
    block: dict[str, Any] = {"verdict": "integral" if cert.integral else "rejected"}
    block.update(cert.as_dict())
    if cert.integral:
        trace_ok = cert.trace == int(g.degrees().sum())
        block["trace_identity"] = trace_ok
        if spec.family != "Custom":
            block["analytic_match"] = cert == analytic_spectrum(spec)
    if args.format == "csv":
        if cert.integral:
            text = to_csv(("value", "multiplicity"), zip(cert.values, cert.multiplicities))
        else:
            text = to_csv(("eigenvalue", "distance"), cert.offending)
        _emit(args, text)
    else:
        _emit(
            args,
            to_json(
                {
                    "config": _config(args),
                    "graph": _graph_info(spec, g.n_vertices),
                    "spectrum": block,
                }
            ),
        )
    return EXIT_OK


def cmd_depth(args: argparse.Namespace) -> int:
    if args.analytic:
        spec, _ = resolve_graph(args.graph)
        if spec.family == "Custom":
            raise InputError("--analytic needs a named family")
        isp = analytic_spectrum(spec)
        n = isp.n
    else:
        spec, g, sp = _load_spectrum(args, args.graph)
        cert = certify_integral(sp, args.int_tol)
        if not cert.integral:
            raise InputError("depth is defined only for integral spectra", {"rejection": cert.as_dict()})
        isp, n = cert, g.n_vertices
    result = depth(isp)
    if args.format == "csv":
        rows = [
            (i, result.gcds[i] if i < len(result.gcds) else "", " ".join(map(str, members)))
            for i, members in enumerate(result.chain)
        ]
        _emit(args, to_csv(("step", "gcd", "members"), rows))
    else:
        _emit(
            args,
            to_json(
                {
                    "config": _config(args),
                    "graph": _graph_info(spec, n),
                    "spectrum": isp.as_dict(),
                    "depth": result.as_dict(),
                }
            ),
        )
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    spec, g = resolve_graph(args.graph)
    g = g or build_graph(spec)
    marked = marked_from_args(args, g.n_vertices)
    params = parse_params(args.params) if args.params else None
    sp = eigendecompose(laplacian(g), method=args.method)
    try:
        result = run_search(
            g,
            marked,
            args.mode,
            params,
            tol=args.int_tol,
            require_integral=not args.allow_non_integral,
            spectrum=sp,
        )
    except NonIntegralGraphError as exc:
        raise InputError(str(exc), {"rejection": exc.rejection.as_dict()}) from None
    passed = result.success_probability >= 1 - args.tol
    if args.format == "csv":
        p, c = result.params, result.cost
        header = (
            "graph", "mode", "N", "M", "epsilon", "k", "alpha", "s", "queries",
            "ctqw_calls", "T_prime", "per_reflection_time", "success_probability",
            "ancilla_residue", "marked", "passed",
        )  # fmt: skip
        row = (
            str(spec), args.mode, g.n_vertices, len(marked.members), str(marked.epsilon),
            p.k, p.alpha, p.s, c.oracle_queries, c.ctqw_calls, c.total_evolution_time,
            c.per_reflection_time, result.success_probability, result.ancilla_residue,
            " ".join(map(str, marked.members)), passed,
        )  # fmt: skip
        _emit(args, to_csv(header, [row]))
    else:
        report = {
            "config": _config(args),
            "graph": _graph_info(spec, g.n_vertices),
            "search": {
                "marked": {
                    "members": list(marked.members),
                    "epsilon": str(marked.epsilon),
                    "seed": args.seed if args.marked_count is not None else None,
                },
                "params": result.params.as_dict(),
                "result": {**result.as_dict(), "passed": passed},
                "cost": result.cost.as_dict(),
            },
        }
        _emit(args, to_json(report))
    return EXIT_OK if passed else EXIT_ASSERT


def _sweep_cell(job: tuple) -> tuple:
    index, text, count, seed, mode, int_tol, method = job
    row: dict[str, Any] = {c: None for c in SWEEP_COLUMNS}
    row.update(index=index, graph=text, mode=mode)
    try:
        spec, g = resolve_graph(text)
        g = g or build_graph(spec)
        n = g.n_vertices
        row.update(graph=str(spec), N=n)
        marked = MarkedSet(select_marked(seed, n, min(count, n)), n)
        sp = eigendecompose(laplacian(g), method=method)
        cert = certify_integral(sp, int_tol)
        if cert.integral:
            d = depth(cert).d_L
            row.update(d_L=d, two_pow_dL=2**d)
        res = run_search(g, marked, mode, tol=int_tol, spectrum=sp)
        row.update(
            M=len(marked.members),
            epsilon=str(marked.epsilon),
            k=res.params.k,
            alpha=res.params.alpha,
            s=res.params.s,
            queries=res.cost.oracle_queries,
            ctqw_calls=res.cost.ctqw_calls,
            T_prime=res.cost.total_evolution_time,
            success_probability=res.success_probability,
            ancilla_residue=res.ancilla_residue,
            marked=" ".join(map(str, marked.members)),
        )
    except (SearchError, GraphParameterError, EdgeListFormatError, OSError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return tuple(row[c] for c in SWEEP_COLUMNS)


def cmd_sweep(args: argparse.Namespace) -> int:
    counts = list(args.marked_count or [])
    graphs = list(args.graph or [])
    jobs = [
        (i, text, count, args.seed, args.mode, args.int_tol, args.method)
        for i, (text, count) in enumerate((t, c) for t in graphs for c in counts)
    ]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(j) for j in jobs]
    status = EXIT_OK
    for row in rows:
        rec = dict(zip(SWEEP_COLUMNS, row))
        if rec["error"] or rec["success_probability"] is None or rec["success_probability"] < 1 - args.tol:
            status = EXIT_ASSERT
    if args.format == "csv":
        _emit(args, to_csv(SWEEP_COLUMNS, rows))
    else:
        _emit(args, to_json({"config": _config(args), "columns": list(SWEEP_COLUMNS), "rows": [list(r) for r in rows]}))
    return status


SERIES = {
    "hypercube": lambda n: GraphSpec("Hamming", (n, 2)),
    "johnson23": lambda n: GraphSpec("Johnson", (n, math.ceil(round(n ** (2 / 3), 9)))),
    "antiregular": lambda n: GraphSpec("Antiregular", (n,)),
}


def compare_row(spec: GraphSpec, count: int, int_tol: float = 1e-6, method: str = "jacobi") -> tuple:
    """Closed-form cost columns for one graph; no state-vector simulation."""
    if spec.family == "Custom":
        cert = certify_integral(eigendecompose(laplacian(build_graph(spec)), method=method), int_tol)
        if not cert.integral:
            raise InputError(f"{spec} is not Laplacian integral", {"rejection": cert.as_dict()})
        isp = cert
    else:
        isp = analytic_spectrum(spec)
    n = isp.n
    m = min(count, n)
    params = long_params(Fraction(m, n))
    cfg = PhaseEstimationConfig.from_lambda_max(isp.lambda_max)
    d = depth(isp).d_L
    return (
        str(spec), n, m, str(Fraction(m, n)), math.sqrt(n / m), params.k,
        2 * cfg.s * params.k, params.k * cfg.per_reflection_time(),
        d, 2**d, 2**d * math.sqrt(n),
    )  # fmt: skip


def cmd_compare(args: argparse.Namespace) -> int:
    specs: list[GraphSpec] = [resolve_graph(t)[0] for t in (args.graph or [])]
    if args.series:
        if not args.n:
            raise InputError("--series needs --n")
        specs += [SERIES[args.series](n) for n in parse_int_list(args.n)]
    rows = [compare_row(s, args.marked_count, args.int_tol, args.method) for s in specs]
    if args.format == "csv":
        _emit(args, to_csv(COMPARE_COLUMNS, rows))
    else:
        _emit(args, to_json({"config": _config(args), "columns": list(COMPARE_COLUMNS), "rows": [list(r) for r in rows]}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ciqwsearch",
        description="Deterministic quantum spatial search on Laplacian integral graphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--int-tol", type=float, default=1e-6, help="integrality tolerance")
        p.add_argument("--method", choices=("jacobi", "lapack"), default="jacobi", help="eigensolver")

    p = sub.add_parser("families", help="list supported graph families")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_families)

    for name, func, helptext in (
        ("spectrum", cmd_spectrum, "numeric Laplacian spectrum"),
        ("certify", cmd_certify, "certify the spectrum is integral"),
        ("depth", cmd_depth, "depth of the Laplacian spectrum"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--graph", required=True, help="Family(a,b,..), Path(n), Cycle(n) or edge-list file")
        common(p)
        if name == "depth":
            p.add_argument("--analytic", action="store_true", help="use the closed-form spectrum")
        p.set_defaults(func=func)

    p = sub.add_parser("search", help="run the deterministic search")
    p.add_argument("--graph", required=True)
    p.add_argument("--marked", help="comma-separated marked vertices")
    p.add_argument("--marked-count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=("circuit", "exact"), default="circuit")
    p.add_argument("--params", help="epsilon=1/2, or k=..,alpha=..[,beta=..]")
    p.add_argument("--tol", type=float, default=1e-9, help="success tolerance")
    p.add_argument("--allow-non-integral", action="store_true", help="skip the integrality gate")
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sweep", help="search over a grid of graphs and marked counts")
    p.add_argument("--graph", action="append")
    p.add_argument("--marked-count", type=int, action="append")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("circuit", "exact"), default="circuit")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="closed-form cost and depth table")
    p.add_argument("--graph", action="append")
    p.add_argument("--series", choices=sorted(SERIES))
    p.add_argument("--n", help="series sizes, e.g. 2,4,8,16 or 4-12")
    p.add_argument("--marked-count", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        payload = {"error": str(exc), **exc.detail}
    except (GraphParameterError, EdgeListFormatError, SearchError, OSError, ValueError) as exc:
        payload = {"error": f"{type(exc).__name__}: {exc}"}
    sys.stderr.write(to_json({"config": _config(args), **payload}))
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
