"""Meshfree polynomial collocation for the planar Monge-Ampere Dirichlet problem.

The solver represents the unknown as a bivariate polynomial of bounded
total degree, collocates ``u_xx u_yy - u_xy^2 = g`` on a grid over the
closed square [-1, 1]^2 and ``u = f`` (weighted) on the boundary grid, and
minimizes the squared residuals with a damped Gauss-Newton method, raising
the degree by continuation.
"""

from .analysis import (
    ErrorMetrics,
    StabilityReport,
    boundary_stability_check,
    compute_metrics,
    convergence_table,
    convexity_fraction,
    laplacian_stability_check,
    stability_report,
)
from .collocation import (
    PointSet,
    ResidualSystem,
    assemble,
    jacobian,
    oversampled_points,
    regular_points,
    residual,
)
from .continuation import (
    SolveFailure,
    SolveReport,
    SweepConfig,
    SweepFailure,
    solve_once,
    sweep,
)
from .lsq import LsqDiverged, LsqError, LsqOptions, LsqStalled, LsqTrace
from .poly import BasisTables, CoeffTriangle, basis_matrices, build_tables, evaluate
from .problems import MAProblem, exp_problem, quadratic_problem, taylor_start

__all__ = [
    "BasisTables",
    "CoeffTriangle",
    "ErrorMetrics",
    "LsqDiverged",
    "LsqError",
    "LsqOptions",
    "LsqStalled",
    "LsqTrace",
    "MAProblem",
    "MongeAmpereSolver",
    "PointSet",
    "ResidualSystem",
    "SolveFailure",
    "SolveReport",
    "StabilityReport",
    "SweepConfig",
    "SweepFailure",
    "assemble",
    "basis_matrices",
    "boundary_stability_check",
    "build_tables",
    "compute_metrics",
    "convergence_table",
    "convexity_fraction",
    "evaluate",
    "exp_problem",
    "jacobian",
    "laplacian_stability_check",
    "oversampled_points",
    "quadratic_problem",
    "regular_points",
    "residual",
    "solve_once",
    "stability_report",
    "sweep",
    "taylor_start",
]

__version__ = "0.1.0"


def __getattr__(name):
    # deferred so that plain library/CLI use does not import scikit-learn
    if name == "MongeAmpereSolver":
        from .estimator import MongeAmpereSolver

        return MongeAmpereSolver
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
