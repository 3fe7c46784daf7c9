"""Scikit-learn style front end for the collocation solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .continuation import SweepConfig, solve_once, sweep
from .lsq import LsqOptions
from .poly import CoeffTriangle, basis_matrices
from .problems import MAProblem, exp_problem, quadratic_problem, taylor_start

_NAMED_PROBLEMS = {"exp": exp_problem, "quadratic": quadratic_problem}


class MongeAmpereSolver(BaseEstimator):
    """Meshfree polynomial collocation solver with a fit/predict interface.

    Fitting minimizes the weighted sum of squared collocation residuals of
    ``u_xx u_yy - u_xy^2 = g`` over a tensor grid on the closed square
    [-1, 1]^2 and of ``u = f`` on the boundary grid, over bivariate
    polynomials of bounded total degree.  Prediction evaluates the fitted
    polynomial at arbitrary points.

    Parameters
    ----------
    degree : int, default=8
        Total degree of the polynomial trial space.
    start : {"taylor", "cold-chain"}, CoeffTriangle or array-like, \
            default="taylor"
        Starting coefficients.  ``"taylor"`` truncates the series of the
        exponential reference solution; ``"cold-chain"`` runs degree
        continuation from the constant polynomial 1 up to ``degree`` in
        steps of two; anything else is interpreted as a coefficient
        triangle or flat graded-lex coefficient vector of matching degree.
    boundary_weight : float, default=10.0
        Multiplier of the boundary residuals before squaring.
    oversample : float or None, default=None
        When set, use the stability-oversampled grid with this safety
        factor in (0, 1] instead of the default spacing-2/degree grid.
    grid_resolution : int, default=101
        Evaluation grid resolution for the fitted error metrics.
    max_iterations : int, default=400
    residual_tolerance : float, default=1e-12
    gradient_tolerance : float, default=1e-10
    step_tolerance : float, default=1e-12
        Termination controls of the Levenberg-Marquardt minimizer.

    Attributes
    ----------
    coef_ : ndarray of shape (n_coefficients,)
        Fitted coefficients in flat graded-lex order.
    coef_triangle_ : CoeffTriangle
        The same coefficients as a triangle object.
    report_ : SolveReport
        Full outcome of the (final) solve, including the optimizer trace
        and error metrics.
    reports_ : list of SolveReport
        One report per continuation degree (a single report unless
        ``start="cold-chain"``).
    n_iter_ : int
        Accepted Levenberg-Marquardt steps of the final solve.

    Examples
    --------
    >>> from macolloc import exp_problem
    >>> from macolloc.estimator import MongeAmpereSolver
    >>> solver = MongeAmpereSolver(degree=6).fit(exp_problem())
    >>> solver.predict([[0.0, 0.0]]).shape
    (1,)
    """

    def __init__(
        self,
        degree=8,
        start="taylor",
        boundary_weight=10.0,
        oversample=None,
        grid_resolution=101,
        max_iterations=400,
        residual_tolerance=1e-12,
        gradient_tolerance=1e-10,
        step_tolerance=1e-12,
    ):
        self.degree = degree
        self.start = start
        self.boundary_weight = boundary_weight
        self.oversample = oversample
        self.grid_resolution = grid_resolution
        self.max_iterations = max_iterations
        self.residual_tolerance = residual_tolerance
        self.gradient_tolerance = gradient_tolerance
        self.step_tolerance = step_tolerance

    def _lsq_options(self) -> LsqOptions:
        return LsqOptions(
            max_iterations=self.max_iterations,
            residual_tolerance=self.residual_tolerance,
            gradient_tolerance=self.gradient_tolerance,
            step_tolerance=self.step_tolerance,
        )

    def _config(self, degrees, start_mode) -> SweepConfig:
        return SweepConfig(
            degrees=degrees,
            start_mode=start_mode,
            boundary_weight=self.boundary_weight,
            oversample_safety=self.oversample,
            grid_resolution=self.grid_resolution,
            lsq=self._lsq_options(),
        )

    def fit(self, problem, y=None):
        """Solve the collocation problem.

        Parameters
        ----------
        problem : MAProblem or {"exp", "quadratic"}
            The problem data (g, f, optional exact solution).
        y : ignored
            Present for API consistency.

        Returns
        -------
        self : object
        """
        if isinstance(problem, str):
            try:
                problem = _NAMED_PROBLEMS[problem]()
            except KeyError:
                raise ValueError(
                    f"unknown problem {problem!r}; expected one of "
                    f"{sorted(_NAMED_PROBLEMS)}"
                ) from None
        if not isinstance(problem, MAProblem):
            raise TypeError(f"problem must be an MAProblem, got {type(problem)!r}")
        degree = int(self.degree)
        if degree < 0:
            raise ValueError(f"degree must be >= 0, got {degree}")

        if isinstance(self.start, str) and self.start == "cold-chain":
            degrees = tuple(range(degree % 2, degree + 1, 2))
            self.reports_ = sweep(problem, self._config(degrees, "cold_chain"))
        else:
            if isinstance(self.start, str):
                if self.start != "taylor":
                    raise ValueError(
                        f"start must be 'taylor', 'cold-chain', or coefficients, "
                        f"got {self.start!r}"
                    )
                start = taylor_start(degree)
            elif isinstance(self.start, CoeffTriangle):
                start = self.start
            else:
                start = CoeffTriangle(degree, np.asarray(self.start, dtype=float))
            config = self._config((degree,), "taylor")
            self.reports_ = [solve_once(problem, degree, start, config)]
        self.report_ = self.reports_[-1]
        self.coef_triangle_ = self.report_.coeffs
        self.coef_ = np.array(self.report_.coeffs.vec)
        self.n_iter_ = self.report_.trace.iterations
        return self

    def _validate_points(self, X) -> np.ndarray:
        X = check_array(X, dtype=float, ensure_2d=True)
        if X.shape[1] != 2:
            raise ValueError(f"X must have shape (n_points, 2), got {X.shape}")
        return X

    def predict(self, X) -> np.ndarray:
        """Evaluate the fitted polynomial at points ``X`` of shape (n, 2)."""
        check_is_fitted(self, "coef_")
        X = self._validate_points(X)
        value, _, _, _ = basis_matrices(X, self.coef_triangle_.degree)
        return value @ self.coef_

    def predict_hessian(self, X) -> np.ndarray:
        """Second derivatives ``[uxx, uxy, uyy]`` at ``X``, shape (n, 3)."""
        check_is_fitted(self, "coef_")
        X = self._validate_points(X)
        _, dxx, dxy, dyy = basis_matrices(X, self.coef_triangle_.degree)
        return np.column_stack(
            [dxx @ self.coef_, dxy @ self.coef_, dyy @ self.coef_]
        )
