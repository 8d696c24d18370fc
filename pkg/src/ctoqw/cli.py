"""Command-line interface: ``ctoqw {gen,check,steady,evolve,compare}``.

Vertices are numbered from 0.
Exit codes: 0 success, 1 usage or input error, 2 a computed steady state that
contradicts the expected limit behaviour of a connected graph.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT_TOLERANCES, Tolerances
from .dynamics import (InitialState, Trajectory, compare_processes, ctrw_limit,
                       default_times, evolve_ctoqw, evolve_ctqw, evolve_ctrw)
from .graph import (FAMILIES, Graph, GraphError, adjacency, classify, degree_matrix, generate,
                    laplacian, matrix_to_csv, parse_edge_list, transition_matrix)
from .lindblad import (build_lindblad_set, build_liouvillian, check_span_hermitian,
                       check_sum_identity, commutant_dimension)
from .numerics import DensityError, complex_from_json, complex_to_json
from .steady import (SteadyStateError, classify_steady_state, coherence, regression_match,
                     solve_steady_state)

EXIT_OK, EXIT_INPUT, EXIT_FALSIFIED = 0, 1, 2
METHODS = {"expm": "expm", "rk": "rk_adaptive"}
MATRICES = {"adjacency": adjacency, "degree": degree_matrix,
            "laplacian": laplacian, "transition": transition_matrix}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", "-o", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--seed", type=int, default=0, help="seed for random initial states")
    p.add_argument("--method", choices=tuple(METHODS),
                   help="evolution method (default: expm up to 20 vertices, rk above)")
    tol = p.add_argument_group("tolerance overrides")
    for f in fields(Tolerances):
        tol.add_argument(f"--tol-{f.name.replace('_', '-')}", dest=f"tol_{f.name}",
                         type=float, metavar="EPS", help=f"default {f.default:g}")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="ctoqw", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"ctoqw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="write a graph family as an edge list")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("size", type=int, help="vertex count (edge count for star)")
    p.add_argument("--matrix", choices=tuple(MATRICES),
                   help="emit this matrix as CSV instead of the edge list")

    p = sub.add_parser("check", parents=[common], help="structural hypotheses and predicted limit")
    p.add_argument("graph", help="edge-list file ('-' for stdin)")

    p = sub.add_parser("steady", parents=[common], help="solve and classify the steady state")
    p.add_argument("graph")

    p = sub.add_parser("evolve", parents=[common], help="evolve one process in time")
    p.add_argument("graph")
    p.add_argument("--process", choices=("ctoqw", "ctrw", "ctqw"), default="ctoqw")
    p.add_argument("--initial", default="vertex:0",
                   help="vertex:<j> | mixed | uniform | random | file:<path>")
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--samples", type=int,
                   help="uniform samples on [0, t-max] (default: 64 log-spaced points)")
    p.add_argument("--full-state", metavar="PATH", help="also write every state as JSON")

    p = sub.add_parser("compare", parents=[common], help="open vs classical vs unitary walk")
    p.add_argument("graph")
    p.add_argument("--vertex", type=int, default=0, help="start vertex")
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--samples", type=int, default=101)
    return parser


def _tolerances(args) -> Tolerances:
    overrides = {f.name: getattr(args, f"tol_{f.name}") for f in fields(Tolerances)
                 if getattr(args, f"tol_{f.name}", None) is not None}
    bad = [k for k, v in overrides.items() if not v > 0]
    if bad:
        raise UsageError(f"tolerances must be positive: {', '.join(bad)}")
    return replace(DEFAULT_TOLERANCES, **overrides)


def _resolved_config(args, tol: Tolerances) -> dict:
    config = {k: v for k, v in sorted(vars(args).items())
              if not k.startswith("tol_") and k not in ("out", "full_state")}
    return {"tool": "ctoqw", "version": __version__, "config": config,
            "tolerances": tol.as_dict()}


def _csv_header(meta: dict) -> str:
    return "".join(f"# {line}\n" for line in (
        f"{meta['tool']} {meta['version']}",
        "config: " + json.dumps(meta["config"], sort_keys=True),
        "tolerances: " + json.dumps(meta["tolerances"], sort_keys=True),
    ))


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _read_graph(path: str) -> Graph:
    if path == "-":
        return parse_edge_list(sys.stdin.read())
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read graph file: {exc}") from None
    return parse_edge_list(text)


def parse_initial(spec: str, seed: int) -> InitialState:
    kind, _, arg = spec.partition(":")
    if kind == "vertex":
        try:
            return InitialState("vertex", vertex=int(arg))
        except ValueError:
            raise UsageError(f"bad vertex in initial spec {spec!r}") from None
    if kind in ("mixed", "uniform") and not arg:
        return InitialState(kind)
    if kind == "random" and not arg:
        return InitialState("random", seed=seed)
    if kind == "file" and arg:
        try:
            raw = json.loads(Path(arg).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot load initial state: {exc}") from None
        data = np.asarray(raw, dtype=float)
        # flat list -> real vector; otherwise innermost [re, im] pairs
        return InitialState("explicit", data=data if data.ndim == 1 else complex_from_json(raw))
    raise UsageError(f"invalid initial spec {spec!r}; expected vertex:<j>, mixed, uniform, "
                     "random or file:<path>")


def _rows_csv(header: list[str], rows: list[list[str]]) -> str:
    return ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)


def _fmt(x: float) -> str:
    return "%.12e" % x


def cmd_gen(args, tol: Tolerances) -> int:
    g = generate(args.family, args.size)
    meta = _resolved_config(args, tol)
    if args.matrix:
        _emit(_csv_header(meta) + matrix_to_csv(MATRICES[args.matrix](g)), args.out)
    else:
        _emit(_csv_header(meta) + g.to_edge_list(), args.out)
    return EXIT_OK


def check_report(g: Graph, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[dict, bool]:
    """Structural report for ``check``; the flag is False on a contradiction."""
    cls = classify(g, tol)
    report = {"n": g.n, "edges": [list(e) for e in g.sorted_edges()],
              "connected": cls.connected, "components": cls.components,
              "regular": cls.regular, "doubly_stochastic_M": cls.doubly_stochastic_M}
    try:
        lset = build_lindblad_set(g)
    except GraphError as exc:
        report.update(span_hermitian=None, sum_identity=None, commutant=None,
                      note=str(exc), prediction="unknown")
        return report, True
    span = check_span_hermitian(lset)
    ident = check_sum_identity(lset, tol)
    comm = commutant_dimension(lset, tol)
    report.update(span_hermitian=span,
                  sum_identity={"holds": ident.holds, "deviation": ident.deviation},
                  commutant={"dimension": comm.dimension, "trivial": comm.trivial})
    if not cls.connected:
        report["prediction"] = "unknown"
    elif cls.doubly_stochastic_M:
        report["prediction"] = "maximally_mixed"
    else:
        report["prediction"] = "unique_coherent_limit"
    consistent = not cls.connected or (span and ident.holds and comm.trivial)
    report["hypotheses_consistent"] = consistent
    return report, consistent


def cmd_check(args, tol: Tolerances) -> int:
    g = _read_graph(args.graph)
    report, consistent = check_report(g, tol)
    report["meta"] = _resolved_config(args, tol)
    _emit(_dump_json(report), args.out)
    return EXIT_OK if consistent else EXIT_FALSIFIED


def cmd_steady(args, tol: Tolerances) -> int:
    g = _read_graph(args.graph)
    report = classify_steady_state(g, solve_steady_state(build_liouvillian(g), tol), tol)
    meta = _resolved_config(args, tol)
    if args.format == "csv":
        if report.rho_inf is None:
            raise UsageError("steady state is not unique; use --format json for the kernel basis")
        rho = report.rho_inf.data
        rows = [[str(j), str(k), _fmt(rho[j, k].real), _fmt(rho[j, k].imag)]
                for j in range(g.n) for k in range(g.n)]
        _emit(_csv_header(meta) + _rows_csv(["row", "col", "re", "im"], rows), args.out)
    else:
        payload = report.to_json()
        if report.rho_inf is not None:
            coh = coherence(report.rho_inf.data)
            payload["coherence"] = {"l1_offdiag": coh.l1_offdiag, "max_offdiag": coh.max_offdiag,
                                    "diag_distribution": coh.diag_distribution.tolist()}
        payload["reference_match"] = regression_match(g, report)
        payload["meta"] = meta
        _emit(_dump_json(payload), args.out)
    return EXIT_OK if report.convergence_consistent else EXIT_FALSIFIED


def _evolve_times(t_max: float, samples: int | None) -> np.ndarray:
    if t_max < 0:
        raise UsageError("--t-max must be nonnegative")
    if t_max == 0:
        return np.array([0.0])
    if samples is None:
        return default_times(t_max)
    if samples < 2:
        raise UsageError("--samples must be at least 2")
    return np.linspace(0.0, t_max, samples)


def _states_json(traj: Trajectory) -> list:
    if traj.process == "ctrw":
        return [s.tolist() for s in traj.states]
    return [complex_to_json(np.asarray(s)) for s in traj.states]


def cmd_evolve(args, tol: Tolerances) -> int:
    g = _read_graph(args.graph)
    init = parse_initial(args.initial, args.seed)
    times = _evolve_times(args.t_max, args.samples)
    if args.process == "ctoqw":
        method = METHODS[args.method] if args.method else None
        traj = evolve_ctoqw(build_liouvillian(g), init.density(g.n, tol), times, method, tol)
    elif args.process == "ctrw":
        traj = evolve_ctrw(g, init.probabilities(g.n, tol), times, tol)
    else:
        traj = evolve_ctqw(g, init.amplitudes(g.n, tol), times, tol)
    meta = _resolved_config(args, tol)
    dist = traj.distributions()
    if args.format == "json":
        _emit(_dump_json({"meta": meta, "process": traj.process, "times": traj.times.tolist(),
                          "distributions": dist.tolist()}), args.out)
    else:
        header = ["time"] + [f"p{v}" for v in range(g.n)]
        rows = [[_fmt(t)] + [_fmt(x) for x in row] for t, row in zip(traj.times, dist)]
        _emit(_csv_header(meta) + _rows_csv(header, rows), args.out)
    if args.full_state:
        Path(args.full_state).write_text(_dump_json(
            {"meta": meta, "process": traj.process, "times": traj.times.tolist(),
             "states": _states_json(traj)}), encoding="utf-8")
    return EXIT_OK


def cmd_compare(args, tol: Tolerances) -> int:
    g = _read_graph(args.graph)
    init = InitialState("vertex", vertex=args.vertex)
    if not 0 <= args.vertex < g.n:
        raise UsageError(f"--vertex {args.vertex} out of range for n={g.n}")
    lio = build_liouvillian(g)
    method = METHODS[args.method] if args.method else None
    result = compare_processes(g, init, args.t_max, args.samples, method, lio, tol)

    steady = solve_steady_state(lio, tol)
    open_limit = (steady.rho_inf.diagonal() if steady.unique
                  else result.ctoqw.distributions()[-1])
    limit_row = np.concatenate([[np.inf], open_limit,
                                ctrw_limit(g, init.probabilities(g.n)), result.ctqw_limit])
    table = np.vstack([result.table(), limit_row])

    meta = _resolved_config(args, tol)
    header = ["time"] + [f"{proc}_p{v}" for proc in ("ctoqw", "ctrw", "ctqw") for v in range(g.n)]
    if args.format == "json":
        _emit(_dump_json({"meta": meta, "columns": header,
                          "rows": table[:-1].tolist(), "limit": table[-1, 1:].tolist()}),
              args.out)
    else:
        rows = [["inf" if np.isinf(r[0]) else _fmt(r[0])] + [_fmt(x) for x in r[1:]]
                for r in table]
        _emit(_csv_header(meta) + _rows_csv(header, rows), args.out)
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "check": cmd_check, "steady": cmd_steady,
            "evolve": cmd_evolve, "compare": cmd_compare}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = _tolerances(args)
        return COMMANDS[args.command](args, tol)
    except (UsageError, GraphError, DensityError, SteadyStateError, ValueError) as exc:
        print(f"ctoqw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
