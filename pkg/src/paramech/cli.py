"""Command-line front end.

Subcommands:
  run       integrate one or more scenario files, writing trajectory tables
            and summaries (PARAMECH_THREADS caps scenario-level parallelism)
  verify    run the exact identity audit and print/write the report
  audit-el  compare derived- and printed-convention Euler-Lagrange residuals
            along the derived flow of one Lagrangian scenario
  plotdata  extract named columns from a trajectory table as plot-ready CSV

Exit codes: 0 success, 2 parse/validation error, 3 singular system,
4 integrator non-convergence, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .audit import verify_all
from .errors import (
    ConvergenceError,
    ParamechError,
    ScenarioError,
    SingularSystemError,
)
from .lagrangian import LagrangianSystem, el_residuals, integrate_lagrangian
from .scenario import (
    build_field,
    format_float,
    load_scenario,
    run_scenario_files,
)
from .structures import StructureKind, build_structure

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SINGULAR = 3
EXIT_NO_CONVERGENCE = 4
EXIT_IO = 5


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ScenarioError):
        return EXIT_VALIDATION
    if isinstance(exc, SingularSystemError):
        return EXIT_SINGULAR
    if isinstance(exc, ConvergenceError):
        return EXIT_NO_CONVERGENCE
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, (ValueError, ParamechError)):
        return EXIT_VALIDATION
    raise exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paramech",
        description="Mechanics on flat para-quaternionic space: verification and simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate scenario files")
    run.add_argument("scenarios", nargs="+", metavar="scenario-file")
    run.add_argument("--out", default=None, help="output directory (default: cwd)")

    verify = sub.add_parser("verify", help="run the exact identity audit")
    verify.add_argument("--n", type=int, default=2, help="largest block size n (default 2)")
    verify.add_argument("--report", default=None, help="also write the report to this file")

    audit = sub.add_parser(
        "audit-el", help="compare printed vs derived Euler-Lagrange residuals"
    )
    audit.add_argument("scenario", metavar="scenario-file")

    plotdata = sub.add_parser("plotdata", help="extract columns from a trajectory table")
    plotdata.add_argument("trajectory", metavar="trajectory-file")
    plotdata.add_argument(
        "--cols", required=True, help="comma-separated column names, e.g. t,x_1,x_2"
    )
    return parser


def _cmd_run(args) -> int:
    results = run_scenario_files(args.scenarios, out_dir=args.out)
    for result in results:
        print(
            f"{result.name}: {len(result.trajectory)} samples, "
            f"energy drift {format_float(result.energy_drift_max)}, "
            f"endpoint distance {format_float(result.endpoint_distance)}"
        )
        print(f"  trajectory -> {result.trajectory_path}")
        print(f"  summary    -> {result.summary_path}")
        for warning in result.warnings:
            print(f"  warning: {warning}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = verify_all(args.n)
    text = report.render()
    print(text)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_audit_el(args) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.formalism != "lagrangian":
        raise ScenarioError(
            "audit-el needs a lagrangian scenario", field="formalism"
        )
    field = build_field(scenario.function, scenario.n)
    op = build_structure(StructureKind(scenario.structure), scenario.n)
    derived_system = LagrangianSystem(op, field, convention="derived")
    printed_system = LagrangianSystem(op, field, convention="printed")
    traj = integrate_lagrangian(
        derived_system, scenario.x0, scenario.t_end, scenario.dt, scenario.method
    )
    derived_max = el_residuals(derived_system, traj).max_abs()
    printed_max = el_residuals(printed_system, traj).max_abs()
    print(f"euler-lagrange residual audit: {args.scenario}")
    print(
        f"structure = {scenario.structure}, n = {scenario.n}, "
        f"t_end = {format_float(scenario.t_end)}, dt = {format_float(scenario.dt)}"
    )
    print(f"derived convention: max |residual| = {format_float(derived_max)}")
    print(f"printed convention: max |residual| = {format_float(printed_max)}")
    if printed_max > max(1e-6, 1e3 * derived_max):
        print(
            "printed system deviates from the derived flow for structure "
            f"{scenario.structure} (documented sign discrepancy)"
        )
    else:
        print("printed system matches the derived flow")
    return EXIT_OK


def _cmd_plotdata(args) -> int:
    wanted = [name.strip() for name in args.cols.split(",") if name.strip()]
    if not wanted:
        raise ScenarioError("no columns requested", field="cols")
    with open(args.trajectory, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ScenarioError("trajectory file is empty", field="trajectory") from None
        missing = [name for name in wanted if name not in header]
        if missing:
            raise ScenarioError(
                f"unknown columns {missing}; available: {', '.join(header)}",
                field="cols",
            )
        indices = [header.index(name) for name in wanted]
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(wanted)
        for row in reader:
            writer.writerow([row[k] for k in indices])
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "verify": _cmd_verify,
        "audit-el": _cmd_audit_el,
        "plotdata": _cmd_plotdata,
    }
    try:
        return handlers[args.command](args)
    except BrokenPipeError:
        # Downstream consumer (e.g. head) closed the pipe; not a failure.
        sys.stderr.close()
        return EXIT_OK
    except BaseException as exc:  # mapped to documented exit codes
        if isinstance(exc, (KeyboardInterrupt, SystemExit)):
            raise
        code = _exit_code(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
