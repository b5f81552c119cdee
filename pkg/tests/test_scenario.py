from fractions import Fraction

import pytest

from paramech.errors import ScenarioError
from paramech.scenario import (
    build_field,
    parse_scenario,
    run_scenario,
    run_scenario_files,
    serialize_scenario,
)

HARMONIC_HAMILTONIAN = """
# minimal harmonic scenario
n = 1
formalism = hamiltonian
structure = F
function = harmonic
x0 = 1 0 0 0
t_end = 6.2832
dt = 0.001
method = implicit_midpoint
"""

POLY_LAGRANGIAN = """
n = 1
formalism = lagrangian
structure = G
function = polynomial
term = 1/2 : 2 0 0 0
term = 0.5 : 0 2 0 0
term = 1/2 : 0 0 2 0
term = 1/2 : 0 0 0 2
convention = derived
x0 = 1 0 0 0
t_end = 1.0
dt = 0.01
method = implicit_midpoint
"""


def test_parse_minimal_scenario():
    scenario = parse_scenario(HARMONIC_HAMILTONIAN)
    assert scenario.n == 1
    assert scenario.formalism == "hamiltonian"
    assert scenario.structure == "F"
    assert scenario.function.kind == "harmonic"
    assert scenario.x0 == (1.0, 0.0, 0.0, 0.0)
    assert scenario.convention is None
    assert scenario.kind.dual


def test_parse_polynomial_terms_exact():
    scenario = parse_scenario(POLY_LAGRANGIAN)
    assert scenario.function.terms[0] == (Fraction(1, 2), (2, 0, 0, 0))
    assert scenario.function.terms[1] == (Fraction(1, 2), (0, 2, 0, 0))
    field = build_field(scenario.function, scenario.n)
    assert field.value([1.0, 0.0, 0.0, 0.0]) == 0.5


def test_dimension_error_in_x0():
    text = HARMONIC_HAMILTONIAN.replace("x0 = 1 0 0 0", "x0 = 1 0 0")
    with pytest.raises(ScenarioError, match="x0"):
        parse_scenario(text)


def test_convention_rejected_for_hamiltonian():
    text = HARMONIC_HAMILTONIAN + "convention = printed\n"
    with pytest.raises(ScenarioError, match="convention"):
        parse_scenario(text)


def test_unknown_key_reports_line():
    text = HARMONIC_HAMILTONIAN + "colour = blue\n"
    with pytest.raises(ScenarioError, match="unknown key"):
        parse_scenario(text)


def test_unknown_builtin():
    text = HARMONIC_HAMILTONIAN.replace("function = harmonic", "function = fourier")
    with pytest.raises(ScenarioError, match="function"):
        parse_scenario(text)


def test_dt_must_fit_into_t_end():
    text = HARMONIC_HAMILTONIAN.replace("dt = 0.001", "dt = 10.0")
    with pytest.raises(ScenarioError, match="dt"):
        parse_scenario(text)


def test_polynomial_needs_terms():
    text = HARMONIC_HAMILTONIAN.replace("function = harmonic", "function = polynomial")
    with pytest.raises(ScenarioError, match="term"):
        parse_scenario(text)


def test_term_exponent_count_checked():
    text = POLY_LAGRANGIAN.replace("term = 1/2 : 2 0 0 0", "term = 1/2 : 2 0 0")
    with pytest.raises(ScenarioError, match="exponents"):
        parse_scenario(text)


def test_masses_validation():
    text = HARMONIC_HAMILTONIAN.replace(
        "function = harmonic", "function = kinetic_minus_potential"
    )
    with pytest.raises(ScenarioError, match="masses"):
        parse_scenario(text)
    complete = text + "masses = 1.0\ng_const = 9.81\n"
    scenario = parse_scenario(complete)
    assert scenario.function.masses == (1.0,)
    assert scenario.function.g_const == 9.81


def test_method_must_match_formalism():
    text = POLY_LAGRANGIAN.replace("method = implicit_midpoint", "method = symplectic_euler")
    with pytest.raises(ScenarioError, match="method"):
        parse_scenario(text)


def test_round_trip_identity():
    for text in (HARMONIC_HAMILTONIAN, POLY_LAGRANGIAN):
        scenario = parse_scenario(text)
        assert parse_scenario(serialize_scenario(scenario)) == scenario
    kmp = parse_scenario(
        HARMONIC_HAMILTONIAN.replace("function = harmonic", "function = kinetic_minus_potential")
        + "masses = 2.0\ng_const = 9.81\nout_trajectory = custom.csv\n"
    )
    assert parse_scenario(serialize_scenario(kmp)) == kmp


def test_run_writes_deterministic_outputs(tmp_path):
    scenario = parse_scenario(HARMONIC_HAMILTONIAN.replace("t_end = 6.2832", "t_end = 0.5"))
    first = run_scenario(scenario, "demo", tmp_path)
    content_a = first.trajectory_path.read_bytes()
    summary_a = first.summary_path.read_bytes()
    second = run_scenario(scenario, "demo", tmp_path)
    assert second.trajectory_path.read_bytes() == content_a
    assert second.summary_path.read_bytes() == summary_a
    header = content_a.decode().splitlines()[0]
    assert header == "t,x_1,x_2,x_3,x_4,energy,res_1,res_2,res_3,res_4"


def test_run_harmonic_reports_conservation(tmp_path):
    scenario = parse_scenario(
        HARMONIC_HAMILTONIAN.replace("t_end = 6.2832", "t_end = 6.283185307179586")
    )
    result = run_scenario(scenario, "circle", tmp_path)
    assert result.energy_drift_max <= 1e-10
    assert result.endpoint_distance <= 1e-6
    summary = result.summary_path.read_text()
    assert "energy_drift_max" in summary
    assert "endpoint_distance_from_start" in summary


def test_run_printed_f_warns(tmp_path):
    text = POLY_LAGRANGIAN.replace("structure = G", "structure = F").replace(
        "convention = derived", "convention = printed"
    )
    result = run_scenario(parse_scenario(text), "audit", tmp_path)
    assert result.warnings
    assert result.printed_residual_max >= 0.1
    assert result.derived_residual_max <= 1e-6
    assert "warning" in result.summary_path.read_text()


def test_run_many_with_thread_cap(tmp_path, monkeypatch):
    monkeypatch.setenv("PARAMECH_THREADS", "2")
    paths = []
    for k, structure in enumerate("FGH"):
        text = HARMONIC_HAMILTONIAN.replace("structure = F", f"structure = {structure}").replace(
            "t_end = 6.2832", "t_end = 0.5"
        )
        path = tmp_path / f"scenario_{k}.scn"
        path.write_text(text)
        paths.append(path)
    results = run_scenario_files(paths, out_dir=tmp_path)
    assert len(results) == 3
    for result in results:
        assert result.trajectory_path.exists()


def test_custom_output_paths(tmp_path):
    text = HARMONIC_HAMILTONIAN + "out_trajectory = a/b.csv\nout_summary = a/b.txt\n"
    result = run_scenario(parse_scenario(text), "named", tmp_path)
    assert result.trajectory_path == tmp_path / "a/b.csv"
    assert result.trajectory_path.exists()
    assert result.summary_path.exists()
