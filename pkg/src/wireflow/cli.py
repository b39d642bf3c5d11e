"""Command-line front end.

Subcommands::

    solve     one Newton solve at a fixed demand scale
    search    maximal admissible demand scale (bracketing; --basic for grid walk)
    sweep     per-scale convergence/conditioning records over [0, 1]
    scenario  emit a built-in circuit as a netlist document
    timeline  quasi-static single-vehicle route simulation
    verify    grid check that every scale below the accepted one solves

Inputs are either a netlist JSON path or a built-in scenario name
(``single-load``, ``toy-1``, ``toy-2``).  Exit status: 0 on success, 1 on
any validation error, 2 when ``solve`` finds no solution at the requested
scale.  Output is a human-readable table by default; ``--format csv`` and
``--format json`` emit machine-readable text with fixed field order and
fixed float formatting (4 decimal places for scales, 6 significant digits
for potentials), so identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys as _sys
from pathlib import Path

import json

import numpy as np

from .analysis import alpha_sweep, branch_report
from .netlist import NetlistError, dumps_netlist, load_netlist
from .network import CircuitError, CircuitSpec, MnaSystem, assemble
from .newton import NrConfig, initial_guess, newton_solve
from .scenarios import (
    single_load_circuit,
    straight_route_timeline,
    toy_case_1,
    toy_case_2,
)
from .search import (
    SearchBudgetError,
    SearchConfig,
    search_basic,
    search_efficient,
    verify_dichotomy,
)

__all__ = ["main", "entry"]

_SCENARIOS = {
    "single-load": lambda: single_load_circuit(600.0, 0.1, 1e6),
    "toy-1": lambda: toy_case_1().to_circuit(),
    "toy-2": lambda: toy_case_2().to_circuit(),
}


class _Parser(argparse.ArgumentParser):
    # Usage problems are validation errors: exit 1, not argparse's 2.
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt_alpha(alpha: float) -> str:
    return f"{alpha:.4f}"


def _fmt_v(value: float) -> str:
    return f"{value:.6g}"


def _add_nr_flags(parser) -> None:
    parser.add_argument(
        "--delta-con", type=float, default=1e-8, metavar="TOL",
        help="Newton residual tolerance (default 1e-8)",
    )
    parser.add_argument(
        "--max-nr", type=int, default=10, metavar="N",
        help="initial Newton iteration budget (default 10)",
    )


def _add_search_flags(parser) -> None:
    _add_nr_flags(parser)
    parser.add_argument(
        "--delta-opt", type=float, default=1e-5, metavar="TOL",
        help="optimality tolerance of the scale search (default 1e-5)",
    )
    parser.add_argument(
        "--delta-act", type=float, default=1e-2, metavar="TOL",
        help="initial bracket tolerance (default 1e-2)",
    )
    parser.add_argument(
        "--c-bi", type=float, default=0.5, metavar="C",
        help="bisection coefficient in (0, 1) (default 0.5)",
    )
    parser.add_argument(
        "--delta-alpha", type=float, default=1e-2, metavar="STEP",
        help="grid step of the basic strategy (default 1e-2)",
    )


def _add_output_flags(parser) -> None:
    parser.add_argument(
        "--format", choices=("table", "csv", "json"), default="table",
        help="output format (default table)",
    )
    parser.add_argument(
        "--out", metavar="PATH", default=None,
        help="write output to a file instead of standard output",
    )


def _nr_config(args) -> NrConfig:
    return NrConfig(delta_con=args.delta_con, max_iters=args.max_nr)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        delta_alpha=args.delta_alpha,
        delta_opt=args.delta_opt,
        delta_act=args.delta_act,
        c_bi=args.c_bi,
        nr=_nr_config(args),
    )


def _load_circuit(ref: str) -> CircuitSpec:
    if ref in _SCENARIOS:
        return _SCENARIOS[ref]()
    if not Path(ref).exists():
        raise NetlistError(
            f"{ref!r} is neither a built-in scenario "
            f"({', '.join(sorted(_SCENARIOS))}) nor an existing netlist file"
        )
    return load_netlist(ref)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        _sys.stdout.write(text)


def _potential_rows(sys: MnaSystem, phi) -> list[tuple[str, str, str]]:
    part = sys.partition
    roles = (
        [("wire", n) for n in part.passive_nodes()]
        + [("load", n) for n in part.load_nodes()]
        + [("source", n) for n in part.source_nodes()]
    )
    return [
        (node, role, _fmt_v(float(phi[part.index[node]])))
        for role, node in roles
    ]


def _solution_doc(spec, sys, phi, alpha, delta_con) -> dict:
    report = branch_report(spec, sys, phi, alpha, delta_con=delta_con)
    return {
        "alpha": _fmt_alpha(alpha),
        "potentials": [
            {"node": node, "role": role, "volts": volts}
            for node, role, volts in _potential_rows(sys, phi)
        ],
        "branch_report": report.to_doc(spec),
    }


def _solution_table(spec, sys, phi, alpha, delta_con, header: str) -> str:
    report = branch_report(spec, sys, phi, alpha, delta_con=delta_con)
    lines = [header]
    lines.append("node        role    potential_v")
    for node, role, volts in _potential_rows(sys, phi):
        lines.append(f"{node:<11s} {role:<7s} {volts}")
    lines.append(
        f"power: sources {_fmt_v(report.total_source_power)} W = "
        f"loads {_fmt_v(report.total_received_power)} W + "
        f"losses {_fmt_v(report.total_loss)} W"
    )
    return "\n".join(lines) + "\n"


def _solution_csv(sys, phi) -> str:
    lines = ["node,role,potential_v"]
    lines += [",".join(row) for row in _potential_rows(sys, phi)]
    return "\n".join(lines) + "\n"


def _render_solution(args, spec, sys, phi, alpha, header: str) -> str:
    # Branch reports gate on convergence; honour the user's tolerance.
    tol = getattr(args, "delta_con", 1e-8)
    if args.format == "json":
        return json.dumps(_solution_doc(spec, sys, phi, alpha, tol), indent=2) + "\n"
    if args.format == "csv":
        return _solution_csv(sys, phi)
    return _solution_table(spec, sys, phi, alpha, tol, header)


def _cmd_solve(args) -> int:
    spec = _load_circuit(args.input)
    if not (0.0 <= args.alpha <= 1.0):
        raise ValueError("--alpha must lie in [0, 1]")
    sys_ = assemble(spec)
    outcome = newton_solve(sys_, args.alpha, initial_guess(sys_), _nr_config(args))
    if not outcome.converged:
        _sys.stderr.write(
            f"no solution at scale {_fmt_alpha(args.alpha)} "
            f"(Newton {outcome.failure} after {outcome.iterations} iterations)\n"
        )
        return 2
    header = (
        f"solved at alpha = {_fmt_alpha(args.alpha)} "
        f"({outcome.iterations} Newton iterations, residual "
        f"{outcome.final_residual_norm:.3e})"
    )
    _emit(args, _render_solution(args, spec, sys_, outcome.phi, args.alpha, header))
    return 0


def _cmd_search(args) -> int:
    spec = _load_circuit(args.input)
    sys_ = assemble(spec)
    cfg = _search_config(args)
    result = search_basic(sys_, cfg) if args.basic else search_efficient(sys_, cfg)
    header = (
        f"alpha_hat = {_fmt_alpha(result.alpha_hat)}"
        f"{' (fully supplied)' if result.fully_supplied else ''}"
        f" after {len(result.trace)} Newton runs"
    )
    _emit(
        args,
        _render_solution(args, spec, sys_, result.phi, result.alpha_hat, header),
    )
    return 0


def _cmd_sweep(args) -> int:
    spec = _load_circuit(args.input)
    if args.grid < 2:
        raise ValueError("--grid must be at least 2")
    sys_ = assemble(spec)
    grid = np.linspace(0.0, 1.0, args.grid)
    report = alpha_sweep(sys_, grid, _nr_config(args))
    if args.format == "json":
        _emit(args, json.dumps(report.to_doc(), indent=2) + "\n")
    elif args.format == "csv":
        _emit(args, report.to_csv())
    else:
        lines = ["alpha    converged  residual      iters  condition"]
        for r in report.records:
            cond = "-" if r.condition is None else f"{r.condition:.3e}"
            lines.append(
                f"{_fmt_alpha(r.alpha)}   {str(r.converged).lower():<9s}  "
                f"{r.residual_norm:<12.3e}  {r.iterations:<5d}  {cond}"
            )
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_scenario(args) -> int:
    if args.name not in _SCENARIOS:
        raise ValueError(
            f"unknown scenario {args.name!r}; choose from "
            f"{', '.join(sorted(_SCENARIOS))}"
        )
    _emit(args, dumps_netlist(_SCENARIOS[args.name]()))
    return 0


def _cmd_timeline(args) -> int:
    steps = straight_route_timeline(
        route_length_m=args.route_length,
        intersection_spacing_m=args.spacing,
        dt_s=args.dt,
        cfg=_search_config(args),
    )
    if args.format == "json":
        doc = {
            "steps": [
                {
                    "time_s": s.time_s,
                    "position_m": s.position_m,
                    "demand_w": s.demand_w,
                    "alpha": _fmt_alpha(s.alpha_hat),
                    "received_w": s.received_w,
                }
                for s in steps
            ]
        }
        _emit(args, json.dumps(doc, indent=2) + "\n")
        return 0
    rows = [
        (
            f"{s.time_s:.1f}",
            f"{s.position_m:.1f}",
            f"{s.demand_w:.6g}",
            _fmt_alpha(s.alpha_hat),
            f"{s.received_w:.6g}",
        )
        for s in steps
    ]
    if args.format == "csv":
        lines = ["time_s,position_m,demand_w,alpha,received_w"]
        lines += [",".join(row) for row in rows]
        _emit(args, "\n".join(lines) + "\n")
        return 0
    lines = ["time_s   position_m  demand_w    alpha   received_w"]
    lines += [
        f"{t:<8s} {p:<11s} {d:<11s} {a:<7s} {r}" for t, p, d, a, r in rows
    ]
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_verify(args) -> int:
    spec = _load_circuit(args.input)
    sys_ = assemble(spec)
    result = search_efficient(sys_, _search_config(args))
    report = verify_dichotomy(sys_, result.alpha_hat, args.grid)
    doc = {
        "alpha_hat": _fmt_alpha(result.alpha_hat),
        "grid_size": args.grid,
        "passed": report.passed,
        "failed_alpha": (
            None if report.failed_alpha is None else _fmt_alpha(report.failed_alpha)
        ),
    }
    if args.format == "json":
        _emit(args, json.dumps(doc, indent=2) + "\n")
    elif args.format == "csv":
        _emit(
            args,
            "alpha_hat,grid_size,passed,failed_alpha\n"
            f"{doc['alpha_hat']},{args.grid},"
            f"{str(report.passed).lower()},{doc['failed_alpha'] or ''}\n",
        )
    else:
        verdict = (
            "every sampled scale solves"
            if report.passed
            else f"FAILED at scale {doc['failed_alpha']}"
        )
        _emit(
            args,
            f"alpha_hat = {doc['alpha_hat']}; checked {args.grid} grid "
            f"points: {verdict}\n",
        )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="wireflow",
        description="DC power flow for overhead-wire circuits with "
        "maximal-demand scaling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one Newton solve at a fixed scale")
    p.add_argument("input", help="netlist path or scenario name")
    p.add_argument("--alpha", type=float, default=1.0, help="demand scale in [0, 1]")
    _add_nr_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("search", help="maximal admissible demand scale")
    p.add_argument("input", help="netlist path or scenario name")
    p.add_argument(
        "--basic", action="store_true",
        help="use the incremental grid strategy instead of bracketing",
    )
    _add_search_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("sweep", help="convergence/conditioning over scales")
    p.add_argument("input", help="netlist path or scenario name")
    p.add_argument(
        "--grid", type=int, default=101,
        help="number of scale grid points on [0, 1] (default 101)",
    )
    _add_nr_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("scenario", help="emit a built-in circuit as a netlist")
    p.add_argument("name", help=f"one of: {', '.join(sorted(_SCENARIOS))}")
    p.add_argument("--out", metavar="PATH", default=None)
    p.set_defaults(func=_cmd_scenario, format="json")

    p = sub.add_parser("timeline", help="single-vehicle route simulation")
    p.add_argument("--route-length", type=float, default=8000.0, metavar="M")
    p.add_argument("--spacing", type=float, default=200.0, metavar="M")
    p.add_argument(
        "--dt", type=float, default=5.0, metavar="S",
        help="time step in seconds (default 5)",
    )
    _add_search_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_timeline)

    p = sub.add_parser("verify", help="sample the admissible interval")
    p.add_argument("input", help="netlist path or scenario name")
    p.add_argument(
        "--grid", type=int, default=50,
        help="number of scales sampled on [0, alpha_hat] (default 50)",
    )
    _add_search_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CircuitError, NetlistError, ValueError) as exc:
        _sys.stderr.write(f"error: {exc}\n")
        return 1
    except SearchBudgetError as exc:
        _sys.stderr.write(
            f"error: {exc} (trace length {len(exc.trace)})\n"
        )
        return 1
    except np.linalg.LinAlgError as exc:
        _sys.stderr.write(f"error: {exc}\n")
        return 1


def entry() -> None:
    _sys.exit(main())


if __name__ == "__main__":
    entry()
