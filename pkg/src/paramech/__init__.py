"""Mechanics on flat para-quaternionic space R^{4n}.

Exact split-quaternion arithmetic, the canonical structure triple F, G, H and
its duals, symbolic exterior calculus with rational coefficients, and the
Lagrangian and Hamiltonian dynamics the structures generate, with an audit
suite that re-derives every displayed identity.
"""

from .audit import AuditRecord, AuditReport, verify_all
from .errors import (
    ConvergenceError,
    ParamechError,
    ScenarioError,
    SingularFormError,
    SingularHessianError,
    SingularPointError,
    SingularSystemError,
)
from .exterior import (
    KForm,
    PolyScalar,
    SymVectorField,
    ext_d,
    form_from_constant_matrix,
    form_to_matrix,
    interior,
    lagrangian_two_form,
    vertical_derivation,
    vertical_differential,
    wedge,
)
from .fields import (
    DistanceFromOrigin,
    EvalResult,
    KineticField,
    PolynomialField,
    PotentialField,
    ScalarField,
    SumField,
    eval_field,
    harmonic_field,
    kinetic_energy,
    kinetic_minus_potential_field,
    lagrangian_from_energies,
    potential_energy,
)
from .hamiltonian import (
    CanonicalSymplecticForm,
    HamiltonianSystem,
    canonical_two_form,
    generic_field_from_form,
    hamilton_residuals,
    hamiltonian_vector_field,
    integrate_hamiltonian,
    liouville_one_form,
)
from .integrators import (
    ResidualSeries,
    StepperConfig,
    Trajectory,
    integrate_field,
    integrate_mass_system,
    step_explicit,
    step_implicit_mass,
)
from .lagrangian import (
    LagrangianSystem,
    canonical_rhs,
    el_residuals,
    integrate_lagrangian,
    intrinsic_solve,
    lagrangian_energy,
    liouville_field,
    printed_sign_matrix,
)
from .scenario import (
    FieldSpec,
    RunResult,
    Scenario,
    build_field,
    load_scenario,
    parse_scenario,
    run_scenario,
    run_scenario_files,
    serialize_scenario,
)
from .split_quaternions import (
    BMatrix,
    BVector,
    SplitQuaternion,
    SquareClass,
    bn_inner,
    group_action,
    sp_nB_member,
    sq_conj,
    sq_mul,
    sq_norm_sq,
    sq_square_class,
)
from .structures import (
    DUAL_KINDS,
    PRIMAL_KINDS,
    NeutralMetric,
    RelationCheck,
    StructureKind,
    StructureOperator,
    build_structure,
    fundamental_form,
    metric_compatibility,
    neutral_metric,
    verify_relations,
)

__version__ = "0.1.0"
