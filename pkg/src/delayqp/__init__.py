"""Convex QP solving with a delayed projection neural network.

The network state ``y = (x, v)`` evolves under delayed projection dynamics
whose equilibria are exactly the KKT points of
``min 1/2 x'Qx + c'x  s.t.  Ax = b, Bx <= d``.
"""

from delayqp.config import SolverParams, load_params
from delayqp.estimator import DelayedProjectionQP
from delayqp.exceptions import (
    ConfigError,
    DelayQPError,
    DivergenceError,
    InfeasibleError,
    NotConvergedError,
    ProblemFormatError,
    ProblemValidationError,
    RankDeficientError,
    UndefinedDecayError,
)
from delayqp.integrator import (
    DelaySpec,
    HistoryFn,
    IntegrationConfig,
    Trajectory,
    integrate,
    integrate_field,
    random_histories,
    sample_state,
    write_trajectory_csv,
)
from delayqp.linalg import eigenvalues_symmetric, matrix_rank, spectral_norm
from delayqp.network import (
    BoxSet,
    HSelector,
    NetworkParams,
    ProjectionNetwork,
    build_network,
    build_projectors,
    fixed_point_residual,
    load_network,
    project_box,
    rhs,
)
from delayqp.oracle import KktSolution, kkt_residuals, solve
from delayqp.problem import QpProblem, ValidationReport, load_problem, save_problem, validate
from delayqp.stability import (
    StabilityReport,
    fit_decay_rate,
    search_alpha,
    stability_margin,
    stability_report,
)

__version__ = "0.1.0"
