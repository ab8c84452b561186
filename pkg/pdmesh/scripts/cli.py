"""Command-line front end: ``pdmesh <verb> [options]``.

Exit codes: 0 success, 1 a completed run with a failing check, 2 usage or
input errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import yaml
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from pdmesh.analysis.fem import PoissonProblem, approximation_bounds, assemble, list_mms, run_record, solve
from pdmesh.analysis.functionals import (
    BoundCheckResult,
    empirical_constant,
    equivalence_bounds,
    interp_bound_l2,
    interp_bound_llambda,
    lemma2_bound,
    theta_bound_check,
    vector_bounds,
)
from pdmesh.core.coxeter import CoxeterSpec, coxeter_protection_trend, generate_coxeter
from pdmesh.core.delaunay import delaunay_triangulate, protection_report
from pdmesh.core.mesh import SimplicialMesh
from pdmesh.core.mesh_io import FORMATS, read_mesh, read_points, write_mesh
from pdmesh.core.quality import QualityReport, quality_report
from pdmesh.errors import PdmeshError
from pdmesh.interp.fields import list_fields, make_field
from pdmesh.utils.config_loader import ConfigError
from pdmesh.utils.logging_utils import set_level
from pdmesh.utils.reports import with_checksum, write_csv, write_json_report
from pdmesh.verify.experiment import DEFAULT_CONFIG, SMOKE_CONFIG, load_experiment
from pdmesh.verify.families import structured_grid
from pdmesh.verify.protection import PROTECTION_FLOOR
from pdmesh.verify.suite import VerificationReport, run_verification

__all__ = ["build_parser", "main", "format_summary"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

_INPUT_ERRORS = (PdmeshError, ConfigError, OSError, ValueError)


def format_summary(value: Any) -> str:
    """Compact numeric rendering for summary lines (files keep 17 digits)."""

    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _summary_line(values: Mapping[str, Any]) -> str:
    return " ".join(f"{key}={format_summary(value)}" for key, value in values.items())


def _emit(console: Console, text: str) -> None:
    console.print(text, highlight=False, soft_wrap=True)


def _parse_params(items: Optional[Iterable[str]]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ValueError(f"expected NAME=VALUE, got {item!r}")
        params[key] = yaml.safe_load(raw)
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdmesh", description="Protected Delaunay mesh analysis toolkit.")
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    noise.add_argument("--quiet", action="store_true", help="Log warnings and errors only.")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    analyze = verbs.add_parser("analyze", help="Quality report of a mesh file.")
    analyze.add_argument("mesh", help="Mesh file (text, or JSON by .json suffix).")
    analyze.add_argument("--format", choices=FORMATS, default=None, help="Override the format detected from the suffix.")
    analyze.add_argument("--json", dest="json_out", help="Write the full report as JSON.")
    analyze.add_argument("--csv", dest="csv_out", help="Write one row per element as CSV.")
    analyze.add_argument("--protection", action="store_true", help="Also measure the protection δ.")

    delaunay = verbs.add_parser("delaunay", help="Delaunay triangulation of a points file.")
    delaunay.add_argument("points", help="Points file: 'd N' header then N coordinate lines.")
    delaunay.add_argument("--out", help="Write the mesh here.")
    delaunay.add_argument("--protection", action="store_true", help="Report the protection δ.")
    delaunay.add_argument("--json", dest="json_out", help="Write mesh summary and protection as JSON.")

    coxeter = verbs.add_parser("coxeter", help="Coxeter Ã_d patch inside a cube.")
    coxeter.add_argument("--dim", type=int, required=True)
    coxeter.add_argument("--side", type=float, default=3.0, help="Cube side (default: %(default)s).")
    coxeter.add_argument("--scale", type=float, default=1.0, help="Shortest edge length (default: %(default)s).")
    coxeter.add_argument("--out", help="Write the mesh here.")
    coxeter.add_argument("--protection", action="store_true", help="Report the protection δ.")
    coxeter.add_argument("--trend", action="store_true", help="Tabulate δ/h for d = 2 .. --dim.")

    interp = verbs.add_parser("interp", help="Evaluate the roughness and interpolation bounds of a field on a mesh.")
    interp.add_argument("mesh")
    interp.add_argument("--field", required=True, help=f"Registered field ({', '.join(list_fields())}).")
    interp.add_argument("--param", action="append", metavar="NAME=VALUE", help="Field parameter (YAML value).")
    interp.add_argument("--degree", type=int, default=1, help="Interpolation degree k (default: %(default)s).")
    interp.add_argument("--rho", type=float, action="append", help="Exponent ϱ > 1 (repeatable, default 2).")
    interp.add_argument("--lam", type=float, action="append", help="Exponent λ >= 1 (repeatable, default 2).")
    interp.add_argument("--c-int", type=float, default=None, help="Interpolation constant; theorem checks decide the exit code only when given.")
    interp.add_argument("--json", dest="json_out")

    fem = verbs.add_parser("fem", help="P1 Poisson solve for a manufactured solution.")
    source = fem.add_mutually_exclusive_group(required=True)
    source.add_argument("--mesh", help="Mesh file.")
    source.add_argument("--grid", type=int, help="Kuhn grid of [0, 1]^d with this many cubes per axis.")
    fem.add_argument("--dim", type=int, default=2, help="Dimension of --grid (default: %(default)s).")
    fem.add_argument("--case", default="sine-product", choices=list_mms())
    fem.add_argument("--tol", type=float, default=1e-10, help="CG relative tolerance (default: %(default)s).")
    fem.add_argument("--c-int", type=float, default=None)
    fem.add_argument("--allow-high-dim", action="store_true", help="Permit d >= 4 solves.")
    fem.add_argument("--json", dest="json_out")

    verify = verbs.add_parser("verify", help="Run the verification suite.")
    verify.add_argument("config", nargs="?", default=None, help=f"Experiment config (default: {DEFAULT_CONFIG.name}).")
    verify.add_argument("--smoke", action="store_true", help=f"Use the packaged {SMOKE_CONFIG.name}.")
    verify.add_argument("--seed", type=int, default=None, help="Override the config seed.")
    verify.add_argument("--json", dest="json_out")
    verify.add_argument("--csv", dest="csv_out")
    return parser


def _configure_logging(console: Console, level: int) -> None:
    handler = RichHandler(console=console, show_time=False, show_path=False, rich_tracebacks=True)
    root_logger = logging.getLogger()
    for existing in list(root_logger.handlers):
        root_logger.removeHandler(existing)
    handler.setLevel(level)
    root_logger.addHandler(handler)
    set_level(level)


def _render_checks(console: Console, title: str, checks: Sequence[BoundCheckResult]) -> None:
    table = Table(title=title, show_lines=False)
    table.add_column("Check", justify="left", no_wrap=True)
    table.add_column("LHS", justify="right")
    table.add_column("RHS", justify="right")
    table.add_column("Result", justify="center")
    for check in checks:
        verdict = "[green]pass[/]" if check.passed else "[red]FAIL[/]"
        table.add_row(check.name, format_summary(check.lhs), format_summary(check.rhs), verdict)
    console.print(table)


def _quality_line(report: QualityReport) -> str:
    return _summary_line(
        {
            "dim": report.dim,
            "cells": report.card,
            "h": report.h,
            "C_Delta": report.c_delta,
            "C_Xi": report.c_xi,
            "C_sigma": report.c_sigma,
            "C_Upsilon": report.c_upsilon,
            "Theta": report.theta,
            "R_max": report.r_max,
        }
    )


def _protection_delta(m: SimplicialMesh, h: float) -> float:
    delta = protection_report(m).delta
    return 0.0 if abs(delta) <= PROTECTION_FLOOR * h else delta


def _cmd_analyze(args: argparse.Namespace, console: Console) -> int:
    mesh = read_mesh(args.mesh, args.format)
    report = quality_report(mesh)
    _emit(console, _quality_line(report))
    payload: Dict[str, Any] = {"quality": report.to_dict()}
    if args.protection:
        delta = _protection_delta(mesh, report.h)
        payload["protection"] = {"delta": delta, "delta_over_h": delta / report.h}
        _emit(console, _summary_line({"delta": delta, "delta_over_h": delta / report.h}))
    if args.json_out:
        write_json_report(with_checksum(payload), args.json_out)
    if args.csv_out:
        write_csv(report.csv_rows(), args.csv_out)
    return EXIT_OK


def _cmd_delaunay(args: argparse.Namespace, console: Console) -> int:
    points = read_points(args.points)
    mesh = delaunay_triangulate(points)
    payload: Dict[str, Any] = {"dim": mesh.dim, "vertices": mesh.n_vertices, "cells": mesh.n_cells}
    _emit(console, _summary_line(payload))
    if args.protection:
        delta = _protection_delta(mesh, quality_report(mesh).h)
        payload["delta"] = delta
        _emit(console, _summary_line({"delta": delta}))
    if args.out:
        write_mesh(mesh, args.out)
    if args.json_out:
        write_json_report(with_checksum(payload), args.json_out)
    return EXIT_OK


def _cmd_coxeter(args: argparse.Namespace, console: Console) -> int:
    mesh = generate_coxeter(CoxeterSpec.cube(args.dim, args.side, scale=args.scale))
    report = quality_report(mesh)
    _emit(console, _summary_line({"dim": mesh.dim, "vertices": mesh.n_vertices, "cells": mesh.n_cells}))
    _emit(console, _quality_line(report))
    if args.protection:
        delta = _protection_delta(mesh, report.h)
        _emit(console, _summary_line({"delta": delta, "delta_over_h": delta / report.h}))
    if args.trend:
        table = Table(title="Coxeter protection trend")
        for column in ("d", "delta", "h", "delta/h"):
            table.add_column(column, justify="right")
        for row in coxeter_protection_trend(range(2, args.dim + 1), scale=args.scale):
            table.add_row(str(row["d"]), format_summary(row["delta"]), format_summary(row["h"]), format_summary(row["delta_over_h"]))
        console.print(table)
    if args.out:
        write_mesh(mesh, args.out)
    return EXIT_OK


def _cmd_interp(args: argparse.Namespace, console: Console) -> int:
    mesh = read_mesh(args.mesh)
    field_ = make_field(args.field, mesh.dim, **_parse_params(args.param))
    report = quality_report(mesh)
    rhos = args.rho or [2.0]
    lams = args.lam or [2.0]
    fixed: List[BoundCheckResult] = list(equivalence_bounds(field_, mesh, report=report))
    fixed += [lemma2_bound(field_, mesh, rho, report=report) for rho in rhos]
    fixed.append(theta_bound_check(report))

    c_int = 1.0 if args.c_int is None else args.c_int
    if field_.is_vector:
        theorems = [vector_bounds(field_, mesh, args.degree, c_int, rho=rho, report=report) for rho in rhos]
        theorems += [vector_bounds(field_, mesh, args.degree, c_int, lam=lam, report=report) for lam in lams]
    else:
        theorems = [interp_bound_l2(field_, mesh, args.degree, rho, c_int, report=report) for rho in rhos]
        theorems += [interp_bound_llambda(field_, mesh, args.degree, lam, c_int, report=report) for lam in lams]

    _render_checks(console, "Constant-free checks", fixed)
    _render_checks(console, f"Interpolation bounds (c_int={format_summary(c_int)})", theorems)
    empirical = max(empirical_constant(check) for check in theorems)
    _emit(console, _summary_line({"c_int_empirical": empirical}))
    if args.json_out:
        payload = {
            "field": field_.describe(),
            "checks": [check.to_dict() for check in fixed + theorems],
            "c_int_empirical": empirical,
        }
        write_json_report(with_checksum(payload), args.json_out)
    deciding = fixed + (theorems if args.c_int is not None else [])
    return EXIT_OK if all(check.passed for check in deciding) else EXIT_CHECK_FAILED


def _cmd_fem(args: argparse.Namespace, console: Console) -> int:
    mesh = read_mesh(args.mesh) if args.mesh else structured_grid(args.dim, args.grid)
    system = assemble(PoissonProblem.from_mms(mesh, args.case), allow_high_dim=args.allow_high_dim)
    solution = solve(system, args.tol)
    record = run_record(system, solution)
    _emit(console, _summary_line(record))
    cea, first, second = approximation_bounds(system, solution, 1.0 if args.c_int is None else args.c_int)
    checks = [cea] + ([first, second] if args.c_int is not None else [])
    _render_checks(console, "Finite-element bounds", checks)
    if args.json_out:
        write_json_report(with_checksum({"run": record, "checks": [check.to_dict() for check in checks]}), args.json_out)
    return EXIT_OK if all(check.passed for check in checks) else EXIT_CHECK_FAILED


def _render_verification(console: Console, report: VerificationReport) -> None:
    summary = report.summary()
    table = Table(title="Verification summary")
    table.add_column("Check", justify="left", no_wrap=True)
    table.add_column("Passed", justify="right")
    table.add_column("Total", justify="right")
    for name, counts in summary["by_name"].items():
        style = "green" if counts["passed"] == counts["total"] else "red"
        table.add_row(name, f"[{style}]{counts['passed']}[/]", str(counts["total"]))
    console.print(table)
    if report.calibration is not None:
        _emit(console, _summary_line(report.calibration.to_dict() | {"per_check": len(report.calibration.per_check)}))
    _emit(
        console,
        _summary_line(
            {
                "checks": summary["checks"],
                "failures": summary["failures"],
                "trend_monotone": report.trend_monotone,
                "convergence": "skipped" if report.convergence is None else report.convergence.passed,
                "optimality": "skipped" if report.optimality is None else report.optimality.passed,
                "passed": report.passed,
            }
        ),
    )


def _cmd_verify(args: argparse.Namespace, console: Console) -> int:
    path = SMOKE_CONFIG if args.smoke else args.config
    config = load_experiment(path, seed=args.seed)
    report = run_verification(config)
    _render_verification(console, report)
    if args.json_out:
        write_json_report(report.to_dict(), args.json_out)
    if args.csv_out:
        write_csv(report.csv_rows(), args.csv_out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


_COMMANDS = {
    "analyze": _cmd_analyze,
    "delaunay": _cmd_delaunay,
    "coxeter": _cmd_coxeter,
    "interp": _cmd_interp,
    "fem": _cmd_fem,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    console = Console()
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    _configure_logging(Console(stderr=True), level)

    try:
        return _COMMANDS[args.verb](args, console)
    except FileNotFoundError as exc:
        Console(stderr=True).print(f"[red]File not found: {exc.filename or exc}[/]")
        return EXIT_USAGE
    except _INPUT_ERRORS as exc:
        Console(stderr=True).print(f"[red]{type(exc).__name__}: {exc}[/]")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
