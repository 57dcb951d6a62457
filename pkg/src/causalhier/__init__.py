"""Exact finite tools for the causal hierarchy of binary structural causal models."""

from .bounds import (
    CfQuery,
    CollapseVerdict,
    QueryBounds,
    bound_query,
    build_polytope,
    check_collapse,
    pns_query,
    tian_pearl_pns_bounds,
)
from .causation import (
    CausationReport,
    FeasibilityReport,
    GoodnessReport,
    causation_from_table,
    check_feasible_2ve,
    check_y_good,
    probabilities_of_causation,
    realize_2ve,
)
from .errors import CausalHierError, InfeasibleError, ModelError, PreconditionError, ValidationError
from .hierarchy import (
    CounterfactualTable,
    InterventionalFamily,
    TwoVarFamily,
    interventional_family,
    project_2ve,
    project_l1,
    project_l2,
    project_l3,
    relabel_exogenous,
)
from .lp import LpProblem, LpResult, lp_solve
from .scm import (
    EMPTY,
    DistTable,
    Intervention,
    ScmModel,
    Unit,
    ValidationReport,
    all_interventions,
    counterfactual_joint,
    interventional,
    make_model,
    manipulate,
    observational,
    solve_unit,
    validate_model,
)
from .separation import PairReport, SeparationPlan, build_separated, find_witness_sets, separate, verify_pair
from .standard_form import (
    StandardFormModel,
    acausal_model,
    canonicalize,
    enumerate_atoms,
    evaluate_terms,
    monotonic_example,
    monotonic_reduce,
    split_l1,
)
from .verify import (
    SimReport,
    TestConfig,
    exact_type1_bound,
    make_test,
    simulate_verification,
    y_goodness_hypothesis,
)

__version__ = "0.1.0"
