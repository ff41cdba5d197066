"""Nash-Stackelberg-Nash games with decision-dependent uncertainty."""

__version__ = "0.1.0"

from .audit import AuditReport, audit_assumptions, existence_statement
from .equilibrium import (
    CyclingError,
    EquilibriumCandidate,
    EquilibriumCertificate,
    NonConvergenceError,
    SolveConfig,
    SolverError,
    SweepRow,
    ddu_dominance,
    jacobi_solve,
    lambda_sweep,
    verify_equilibrium,
)
from .followers import (
    FollowerIndeterminateError,
    FollowerUnboundedError,
    ReactionMap,
    build_reaction_map,
    follower_reaction,
    verify_follower_gne,
)
from .leaders import BestResponseResult, check_leader_optimality, leader_best_response
from .model import (
    EmptyUncertaintySetError,
    FollowerSpec,
    LeaderProfile,
    LeaderSpec,
    LqGameSpec,
    ScenarioError,
    check_profile_feasible,
    eval_payoff,
    load_bundled,
    load_scenario,
    parse_scenario,
    uncertainty_interval,
)
from .worst_case import (
    ParetoPoint,
    WorstCaseResult,
    check_strong_pareto,
    check_weak_pareto,
    lambda_weights,
    pareto_front,
    scalarized_worst_case,
)
