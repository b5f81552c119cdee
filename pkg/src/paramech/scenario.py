"""Scenario files: parsing, validation, serialization, and execution.

A scenario is flat ``key = value`` text, one scenario per file.  Polynomial
functions nest their term list as repeated ``term`` lines, each holding an
exact rational coefficient and one exponent per coordinate:

    n = 1
    formalism = lagrangian
    structure = F
    function = polynomial
    term = 1/2 : 2 0 0 0
    term = 1/2 : 0 2 0 0
    convention = derived
    x0 = 1 0 0 0
    t_end = 6.283185307179586
    dt = 0.001
    method = implicit_midpoint

Coefficients accept both "1/2" and "0.5" and are stored exactly.  Output files
are written atomically (temp file, then rename) and deterministically: floats
are printed with 17 significant digits.
"""

from __future__ import annotations

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ScenarioError
from .exterior import PolyScalar
from .fields import (
    PolynomialField,
    ScalarField,
    harmonic_field,
    kinetic_minus_potential_field,
)
from .hamiltonian import (
    HAMILTONIAN_METHODS,
    HamiltonianSystem,
    hamilton_residuals,
    integrate_hamiltonian,
)
from .integrators import ResidualSeries, Trajectory
from .lagrangian import (
    LAGRANGIAN_METHODS,
    LagrangianSystem,
    el_residuals,
    integrate_lagrangian,
)
from .structures import StructureKind, build_structure

__all__ = [
    "FieldSpec",
    "Scenario",
    "RunResult",
    "parse_scenario",
    "serialize_scenario",
    "load_scenario",
    "build_field",
    "run_scenario",
    "run_scenario_files",
    "format_float",
]

FORMALISMS = ("lagrangian", "hamiltonian")
FUNCTION_KINDS = ("harmonic", "polynomial", "kinetic_minus_potential")

_SCALAR_KEYS = (
    "n",
    "formalism",
    "structure",
    "function",
    "convention",
    "x0",
    "t_end",
    "dt",
    "method",
    "masses",
    "g_const",
    "out_trajectory",
    "out_summary",
)


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    terms: tuple[tuple[Fraction, tuple[int, ...]], ...] = ()
    masses: tuple[float, ...] = ()
    g_const: float = 0.0


@dataclass(frozen=True)
class Scenario:
    n: int
    formalism: str
    structure: str
    function: FieldSpec
    x0: tuple[float, ...]
    t_end: float
    dt: float
    method: str
    convention: str | None = None
    out_trajectory: str | None = None
    out_summary: str | None = None

    @property
    def dim(self) -> int:
        return 4 * self.n

    @property
    def kind(self) -> StructureKind:
        return StructureKind(self.structure, dual=self.formalism == "hamiltonian")


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def _parse_lines(text: str) -> list[tuple[int, str, str]]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ScenarioError("empty key or value", line=lineno)
        entries.append((lineno, key, value))
    return entries


def _parse_int(value: str, lineno: int, field: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioError(f"expected an integer, got {value!r}", lineno, field) from None


def _parse_float(value: str, lineno: int, field: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ScenarioError(f"expected a number, got {value!r}", lineno, field) from None


def _parse_floats(value: str, lineno: int, field: str) -> tuple[float, ...]:
    return tuple(_parse_float(part, lineno, field) for part in value.split())


def _parse_term(value: str, lineno: int) -> tuple[Fraction, tuple[int, ...]]:
    if ":" not in value:
        raise ScenarioError("term needs 'coefficient : exponents'", lineno, "term")
    coeff_text, exponent_text = (part.strip() for part in value.split(":", 1))
    try:
        coeff = Fraction(coeff_text)
    except (ValueError, ZeroDivisionError):
        raise ScenarioError(
            f"bad coefficient {coeff_text!r}", lineno, "term"
        ) from None
    try:
        exponents = tuple(int(part) for part in exponent_text.split())
    except ValueError:
        raise ScenarioError("exponents must be integers", lineno, "term") from None
    if any(e < 0 for e in exponents):
        raise ScenarioError("exponents must be nonnegative", lineno, "term")
    return coeff, exponents


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate one scenario."""
    values: dict[str, tuple[int, str]] = {}
    terms: list[tuple[int, tuple[Fraction, tuple[int, ...]]]] = []
    for lineno, key, value in _parse_lines(text):
        if key == "term":
            terms.append((lineno, _parse_term(value, lineno)))
            continue
        if key not in _SCALAR_KEYS:
            raise ScenarioError(f"unknown key {key!r}", lineno, key)
        if key in values:
            raise ScenarioError(f"duplicate key {key!r}", lineno, key)
        values[key] = (lineno, value)

    def require(field: str) -> tuple[int, str]:
        if field not in values:
            raise ScenarioError(f"missing required key {field!r}", field=field)
        return values[field]

    lineno, raw = require("n")
    n = _parse_int(raw, lineno, "n")
    if n < 1:
        raise ScenarioError("n must be at least 1", lineno, "n")
    dim = 4 * n

    lineno, formalism = require("formalism")
    if formalism not in FORMALISMS:
        raise ScenarioError(f"formalism must be one of {FORMALISMS}", lineno, "formalism")

    lineno, structure = require("structure")
    if structure not in ("F", "G", "H"):
        raise ScenarioError("structure must be F, G, or H", lineno, "structure")

    lineno, function_kind = require("function")
    if function_kind not in FUNCTION_KINDS:
        raise ScenarioError(
            f"function must be one of {FUNCTION_KINDS}", lineno, "function"
        )

    if function_kind == "polynomial":
        if not terms:
            raise ScenarioError("polynomial function needs at least one term", field="term")
        for lineno_term, (_, exponents) in terms:
            if len(exponents) != dim:
                raise ScenarioError(
                    f"term needs {dim} exponents, got {len(exponents)}",
                    lineno_term,
                    "term",
                )
    elif terms:
        raise ScenarioError(
            "term lines are only valid with function = polynomial",
            terms[0][0],
            "term",
        )

    masses: tuple[float, ...] = ()
    g_const = 0.0
    if function_kind == "kinetic_minus_potential":
        lineno, raw = require("masses")
        masses = _parse_floats(raw, lineno, "masses")
        if len(masses) != n:
            raise ScenarioError(f"masses needs {n} values", lineno, "masses")
        if any(m <= 0 for m in masses):
            raise ScenarioError("masses must be positive", lineno, "masses")
        lineno, raw = require("g_const")
        g_const = _parse_float(raw, lineno, "g_const")
    else:
        for field in ("masses", "g_const"):
            if field in values:
                raise ScenarioError(
                    f"{field} is only valid with function = kinetic_minus_potential",
                    values[field][0],
                    field,
                )

    convention = None
    if "convention" in values:
        lineno, convention = values["convention"]
        if formalism != "lagrangian":
            raise ScenarioError(
                "convention applies to the lagrangian formalism only",
                lineno,
                "convention",
            )
        if convention not in ("derived", "printed"):
            raise ScenarioError(
                "convention must be derived or printed", lineno, "convention"
            )
    elif formalism == "lagrangian":
        convention = "derived"

    lineno, raw = require("x0")
    x0 = _parse_floats(raw, lineno, "x0")
    if len(x0) != dim:
        raise ScenarioError(f"x0 needs {dim} values, got {len(x0)}", lineno, "x0")

    lineno, raw = require("t_end")
    t_end = _parse_float(raw, lineno, "t_end")
    if t_end < 0:
        raise ScenarioError("t_end must be nonnegative", lineno, "t_end")

    lineno, raw = require("dt")
    dt = _parse_float(raw, lineno, "dt")
    if dt <= 0:
        raise ScenarioError("dt must be positive", lineno, "dt")
    if t_end != 0 and dt >= t_end:
        raise ScenarioError("dt must be smaller than t_end (or t_end = 0)", lineno, "dt")

    lineno, method = require("method")
    allowed = LAGRANGIAN_METHODS if formalism == "lagrangian" else HAMILTONIAN_METHODS
    if method not in allowed:
        raise ScenarioError(
            f"method must be one of {allowed} for {formalism} scenarios",
            lineno,
            "method",
        )

    out_trajectory = values.get("out_trajectory", (0, None))[1]
    out_summary = values.get("out_summary", (0, None))[1]

    return Scenario(
        n=n,
        formalism=formalism,
        structure=structure,
        function=FieldSpec(function_kind, tuple(t for _, t in terms), masses, g_const),
        x0=x0,
        t_end=t_end,
        dt=dt,
        method=method,
        convention=convention,
        out_trajectory=out_trajectory,
        out_summary=out_summary,
    )


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical text for a scenario; parse(serialize(s)) == s."""
    lines = [
        f"n = {scenario.n}",
        f"formalism = {scenario.formalism}",
        f"structure = {scenario.structure}",
        f"function = {scenario.function.kind}",
    ]
    for coeff, exponents in scenario.function.terms:
        lines.append(f"term = {coeff} : {' '.join(str(e) for e in exponents)}")
    if scenario.function.kind == "kinetic_minus_potential":
        lines.append(f"masses = {' '.join(format_float(m) for m in scenario.function.masses)}")
        lines.append(f"g_const = {format_float(scenario.function.g_const)}")
    if scenario.convention is not None:
        lines.append(f"convention = {scenario.convention}")
    lines.append(f"x0 = {' '.join(format_float(v) for v in scenario.x0)}")
    lines.append(f"t_end = {format_float(scenario.t_end)}")
    lines.append(f"dt = {format_float(scenario.dt)}")
    lines.append(f"method = {scenario.method}")
    if scenario.out_trajectory is not None:
        lines.append(f"out_trajectory = {scenario.out_trajectory}")
    if scenario.out_summary is not None:
        lines.append(f"out_summary = {scenario.out_summary}")
    return "\n".join(lines) + "\n"


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def build_field(spec: FieldSpec, n: int) -> ScalarField:
    if spec.kind == "harmonic":
        return harmonic_field(n)
    if spec.kind == "polynomial":
        poly = PolyScalar(4 * n)
        for coeff, exponents in spec.terms:
            poly = poly + PolyScalar.monomial(4 * n, coeff, exponents)
        return PolynomialField(poly)
    return kinetic_minus_potential_field(spec.masses, spec.g_const, n)


@dataclass(frozen=True, eq=False)
class RunResult:
    name: str
    scenario: Scenario
    trajectory: Trajectory
    residuals: ResidualSeries
    energy_drift_max: float
    endpoint_distance: float
    printed_residual_max: float
    derived_residual_max: float | None
    warnings: tuple[str, ...]
    trajectory_path: Path | None = None
    summary_path: Path | None = None


def _atomic_write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", dir=path.parent, prefix=path.name + ".", suffix=".tmp", delete=False
    )
    try:
        with handle:
            handle.write(content)
        os.replace(handle.name, path)
    except BaseException:
        os.unlink(handle.name)
        raise


def _trajectory_table(traj: Trajectory, residuals: ResidualSeries) -> str:
    dim = traj.states.shape[1]
    header = (
        ["t"]
        + [f"x_{a + 1}" for a in range(dim)]
        + ["energy"]
        + [f"res_{a + 1}" for a in range(dim)]
    )
    rows = [",".join(header)]
    energy = traj.invariants["energy"]
    for k in range(len(traj)):
        cells = [format_float(traj.times[k])]
        cells += [format_float(v) for v in traj.states[k]]
        cells.append(format_float(energy[k]))
        cells += [format_float(v) for v in residuals.residuals[k]]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def _execute(scenario: Scenario):
    field = build_field(scenario.function, scenario.n)
    op = build_structure(StructureKind(scenario.structure), scenario.n)
    if scenario.formalism == "lagrangian":
        system = LagrangianSystem(op, field, convention=scenario.convention)
        traj = integrate_lagrangian(
            system, scenario.x0, scenario.t_end, scenario.dt, scenario.method
        )
        derived = el_residuals(
            LagrangianSystem(op, field, convention="derived"), traj
        )
        printed = el_residuals(
            LagrangianSystem(op, field, convention="printed"), traj
        )
        reported = printed if scenario.convention == "printed" else derived
        return traj, reported, printed.max_abs(), derived.max_abs()
    system = HamiltonianSystem(scenario.kind, field)
    traj = integrate_hamiltonian(
        system, scenario.x0, scenario.t_end, scenario.dt, scenario.method
    )
    residuals = hamilton_residuals(system, traj)
    return traj, residuals, residuals.max_abs(), None


def run_scenario(
    scenario: Scenario, name: str, out_dir: str | Path | None = None
) -> RunResult:
    """Integrate one scenario and write its trajectory table and summary."""
    traj, residuals, printed_max, derived_max = _execute(scenario)
    energy = traj.invariants["energy"]
    drift = float(np.max(np.abs(energy - energy[0])))
    endpoint = float(np.linalg.norm(traj.states[-1] - np.asarray(scenario.x0)))

    warnings: list[str] = []
    if scenario.formalism == "lagrangian" and scenario.structure == "F" and printed_max > 1e-6:
        warnings.append(
            "boxed first-order system for structure F deviates from the derived "
            "flow (opposite sign on the gradient terms); see 'paramech audit-el'"
        )

    out_dir = Path(out_dir) if out_dir is not None else Path.cwd()
    trajectory_path = Path(scenario.out_trajectory or f"{name}_trajectory.csv")
    summary_path = Path(scenario.out_summary or f"{name}_summary.txt")
    if not trajectory_path.is_absolute():
        trajectory_path = out_dir / trajectory_path
    if not summary_path.is_absolute():
        summary_path = out_dir / summary_path

    result = RunResult(
        name=name,
        scenario=scenario,
        trajectory=traj,
        residuals=residuals,
        energy_drift_max=drift,
        endpoint_distance=endpoint,
        printed_residual_max=printed_max,
        derived_residual_max=derived_max,
        warnings=tuple(warnings),
        trajectory_path=trajectory_path,
        summary_path=summary_path,
    )
    _atomic_write(trajectory_path, _trajectory_table(traj, residuals))
    _atomic_write(summary_path, render_summary(result))
    return result


def render_summary(result: RunResult) -> str:
    s = result.scenario
    energy = result.trajectory.invariants["energy"]
    lines = [
        f"scenario = {result.name}",
        f"formalism = {s.formalism}",
        f"structure = {s.structure}",
        f"n = {s.n}",
        f"method = {s.method}",
        f"dt = {format_float(s.dt)}",
        f"t_end = {format_float(s.t_end)}",
        f"samples = {len(result.trajectory)}",
        f"energy_initial = {format_float(energy[0])}",
        f"energy_final = {format_float(energy[-1])}",
        f"energy_drift_max = {format_float(result.energy_drift_max)}",
        f"endpoint_distance_from_start = {format_float(result.endpoint_distance)}",
        "final_state = " + " ".join(format_float(v) for v in result.trajectory.states[-1]),
    ]
    if s.formalism == "lagrangian":
        lines.append(f"derived_residual_max = {format_float(result.derived_residual_max)}")
        lines.append(f"printed_residual_max = {format_float(result.printed_residual_max)}")
    else:
        lines.append(f"residual_max = {format_float(result.printed_residual_max)}")
    for warning in result.warnings:
        lines.append(f"warning = {warning}")
    return "\n".join(lines) + "\n"


def run_scenario_files(
    paths, out_dir: str | Path | None = None, max_workers: int | None = None
) -> list[RunResult]:
    """Run several scenario files, possibly in parallel worker threads."""
    paths = [Path(p) for p in paths]
    scenarios = [(p.stem, load_scenario(p)) for p in paths]
    if max_workers is None:
        env = os.environ.get("PARAMECH_THREADS")
        max_workers = int(env) if env else (os.cpu_count() or 1)
    max_workers = max(1, min(max_workers, len(scenarios)))
    if max_workers == 1:
        return [run_scenario(s, name, out_dir) for name, s in scenarios]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(run_scenario, s, name, out_dir) for name, s in scenarios]
        return [f.result() for f in futures]
