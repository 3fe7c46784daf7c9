"""Degree continuation: solve at increasing degrees with chained starts.

``cold_chain`` starts the first degree at the constant polynomial 1 and
every later degree at the embedded optimum of the previous one; ``taylor``
starts every degree at the truncated series of the exponential reference
solution.  Collocation grids are rebuilt per degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analysis import ErrorMetrics, compute_metrics
from .collocation import (
    PointSet,
    assemble,
    oversampled_points,
    regular_points,
    _jacobian_mat,
    _residual_vec,
)
from .lsq import LsqError, LsqOptions, LsqTrace, minimize
from .poly import CoeffTriangle
from .problems import MAProblem, taylor_start

START_MODES = ("cold_chain", "taylor")


@dataclass
class SweepConfig:
    """Shared configuration of a continuation sweep (and of single solves)."""

    degrees: tuple = (0, 2, 4, 6, 8, 10, 12)
    start_mode: str = "cold_chain"
    boundary_weight: float = 10.0
    oversample_safety: Optional[float] = None
    include_boundary: bool = True
    grid_resolution: int = 101
    lsq: LsqOptions = field(default_factory=LsqOptions)

    def __post_init__(self):
        self.degrees = tuple(int(d) for d in self.degrees)
        if not self.degrees:
            raise ValueError("degrees must be nonempty")
        if any(b <= a for a, b in zip(self.degrees, self.degrees[1:])):
            raise ValueError(f"degrees must be strictly ascending, got {self.degrees}")
        if self.start_mode not in START_MODES:
            raise ValueError(f"start_mode must be one of {START_MODES}")


@dataclass
class SolveReport:
    """Outcome of one fixed-degree solve."""

    degree: int
    coeffs: CoeffTriangle
    start: CoeffTriangle
    points: PointSet
    boundary_weight: float
    sum_sq_initial: float
    sum_sq_final: float
    pde_residual_norm: float
    boundary_residual_norm: float
    trace: LsqTrace
    metrics: Optional[ErrorMetrics]


class SolveFailure(RuntimeError):
    """A fixed-degree solve failed; carries the degree and the optimizer trace."""

    def __init__(self, degree: int, cause: Exception, trace: Optional[LsqTrace]):
        super().__init__(f"solve at degree {degree} failed: {cause}")
        self.degree = degree
        self.cause = cause
        self.trace = trace


class SweepFailure(RuntimeError):
    """A sweep aborted; ``reports`` holds the degrees completed before ``failure``."""

    def __init__(self, reports: list, failure: SolveFailure):
        super().__init__(str(failure))
        self.reports = reports
        self.failure = failure


def _points_for(degree: int, config: SweepConfig) -> PointSet:
    # the oversampling bound is vacuous for constants, so degree 0 falls
    # back to the regular grid
    if config.oversample_safety is not None and degree >= 1:
        return oversampled_points(
            degree, config.oversample_safety, config.include_boundary
        )
    return regular_points(degree, config.include_boundary)


def solve_once(
    problem: MAProblem,
    degree: int,
    start: CoeffTriangle,
    config: Optional[SweepConfig] = None,
) -> SolveReport:
    """Assemble the system at one degree and minimize from ``start``."""
    if config is None:
        config = SweepConfig(degrees=(degree,))
    if start.degree != degree:
        raise ValueError(
            f"start has degree {start.degree}, expected {degree}"
        )
    points = _points_for(degree, config)
    system = assemble(problem, points, degree, config.boundary_weight)
    try:
        x, trace = minimize(
            lambda v: _residual_vec(system, v),
            lambda v: _jacobian_mat(system, v),
            start.vec,
            config.lsq,
        )
    except LsqError as err:
        raise SolveFailure(degree, err, err.trace) from err
    except ValueError as err:
        raise SolveFailure(degree, err, None) from err
    coeffs = CoeffTriangle(degree, x)
    final = _residual_vec(system, x)
    n_dom = system.n_domain
    metrics = None
    if problem.exact is not None:
        metrics = compute_metrics(problem, coeffs, config.grid_resolution)
    return SolveReport(
        degree=degree,
        coeffs=coeffs,
        start=start,
        points=points,
        boundary_weight=config.boundary_weight,
        sum_sq_initial=trace.sum_squares[0],
        sum_sq_final=trace.sum_squares[-1],
        pde_residual_norm=float(np.linalg.norm(final[:n_dom])),
        boundary_residual_norm=float(np.linalg.norm(final[n_dom:])),
        trace=trace,
        metrics=metrics,
    )


def sweep(problem: MAProblem, config: Optional[SweepConfig] = None) -> list:
    """Run the continuation over ``config.degrees``, one report per degree.

    A failed degree aborts the sweep with :class:`SweepFailure` carrying the
    completed reports.
    """
    if config is None:
        config = SweepConfig()
    reports: list[SolveReport] = []
    for i, degree in enumerate(config.degrees):
        if config.start_mode == "taylor":
            start = taylor_start(degree)
        elif i == 0:
            start = CoeffTriangle.from_entries(degree, {(0, 0): 1.0})
        else:
            start = reports[-1].coeffs.embed(degree)
        try:
            reports.append(solve_once(problem, degree, start, config))
        except SolveFailure as failure:
            raise SweepFailure(reports, failure) from failure
    return reports
