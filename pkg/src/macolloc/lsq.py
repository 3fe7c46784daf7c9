"""Damped Gauss-Newton (Levenberg-Marquardt) for small dense least squares.

Each step solves min ||[J; sqrt(lam) I] d + [r; 0]|| through an orthogonal
factorization of the stacked damped system (J^T J is never formed, which
matters for badly conditioned monomial bases).  Steps that reduce the sum
of squares are accepted and lower the damping; rejected steps raise it.
When an accepted step's actual reduction matches the linear model's
prediction (gain ratio >= 0.75) the damping drops to zero, so nearly
linear problems proceed by exact Gauss-Newton steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MAX_DAMPING = 1e32
_GOOD_GAIN = 0.75


@dataclass
class LsqOptions:
    """Termination and damping controls.

    ``residual_tolerance`` stops when an accepted step decreases the sum of
    squares by less than tol times its current value; ``gradient_tolerance``
    bounds the inf-norm of J^T r; ``step_tolerance`` stops when a proposed
    step is below tol * (tol + ||x||).
    """

    max_iterations: int = 400
    residual_tolerance: float = 1e-12
    gradient_tolerance: float = 1e-10
    step_tolerance: float = 1e-12
    initial_damping: float = 1e-3
    damping_increase: float = 10.0
    damping_decrease: float = 3.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("residual_tolerance", "gradient_tolerance", "step_tolerance",
                     "initial_damping"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.damping_increase <= 1.0 or self.damping_decrease <= 1.0:
            raise ValueError("damping factors must be > 1")


@dataclass
class LsqTrace:
    """History of one minimization.

    ``sum_squares[0]`` is the starting value and each accepted step appends
    one entry, so accepted sums of squares are strictly decreasing.
    ``gradient_norms`` holds the inf-norm of J^T r at the start of each
    outer iteration; ``dampings`` and ``step_norms`` record each accepted
    step.
    """

    sum_squares: list = field(default_factory=list)
    gradient_norms: list = field(default_factory=list)
    dampings: list = field(default_factory=list)
    step_norms: list = field(default_factory=list)
    termination: str = ""

    @property
    def iterations(self) -> int:
        """Number of accepted steps."""
        return len(self.step_norms)


class LsqError(RuntimeError):
    """Minimization failure; ``trace`` holds the history up to the failure."""

    def __init__(self, message: str, trace: LsqTrace):
        super().__init__(message)
        self.trace = trace


class LsqDiverged(LsqError):
    """The residual became non-finite during iteration."""


class LsqStalled(LsqError):
    """The damped system stayed unsolvable up to the damping growth limit."""


def minimize(residual_fn, jacobian_fn, x0, options: LsqOptions | None = None):
    """Minimize ``sum(residual_fn(x)**2)`` from ``x0``.

    ``residual_fn`` maps an (n,) vector to an (m,) residual vector and
    ``jacobian_fn`` to its (m, n) derivative; both must be pure.  Returns
    ``(x, trace)`` with ``sum(residual_fn(x)**2) <= sum(residual_fn(x0)**2)``.

    Raises :class:`LsqDiverged` on a non-finite residual during iteration
    and :class:`LsqStalled` if no solvable damped system is found before
    the damping growth limit.  A non-finite residual at ``x0`` itself is a
    :class:`ValueError`.
    """
    opts = options if options is not None else LsqOptions()
    x = np.array(x0, dtype=float).reshape(-1)
    r = np.asarray(residual_fn(x), dtype=float)
    if not np.all(np.isfinite(r)):
        raise ValueError("residual is not finite at the starting point")
    ssq = float(r @ r)
    n = x.size
    lam = opts.initial_damping
    lam_restart = opts.initial_damping
    trace = LsqTrace(sum_squares=[ssq])

    for _ in range(opts.max_iterations):
        jac = np.asarray(jacobian_fn(x), dtype=float)
        grad_norm = float(np.abs(jac.T @ r).max()) if r.size else 0.0
        trace.gradient_norms.append(grad_norm)
        if grad_norm <= opts.gradient_tolerance:
            trace.termination = "gradient_tolerance"
            return x, trace

        # Inner loop: raise the damping until a step is solvable and reduces
        # the sum of squares, or a proposed step falls below the step tolerance.
        while True:
            if lam == 0.0:
                stacked = jac
                rhs = -r
            else:
                stacked = np.vstack([jac, np.sqrt(lam) * np.eye(n)])
                rhs = np.concatenate([-r, np.zeros(n)])
            if np.all(np.isfinite(stacked)):
                try:
                    step, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
                except np.linalg.LinAlgError:
                    step = np.array([np.nan])
            else:
                step = np.array([np.nan])
            if not np.all(np.isfinite(step)):
                lam = lam_restart if lam == 0.0 else lam * opts.damping_increase
                if lam > _MAX_DAMPING:
                    trace.termination = "stalled"
                    raise LsqStalled(
                        "damped system unsolvable at the damping growth limit", trace
                    )
                continue
            step_norm = float(np.linalg.norm(step))
            if step_norm <= opts.step_tolerance * (
                opts.step_tolerance + float(np.linalg.norm(x))
            ):
                trace.termination = "step_tolerance"
                return x, trace
            x_new = x + step
            r_new = np.asarray(residual_fn(x_new), dtype=float)
            if not np.all(np.isfinite(r_new)):
                trace.termination = "diverged"
                raise LsqDiverged("residual became non-finite during iteration", trace)
            ssq_new = float(r_new @ r_new)
            if ssq_new < ssq:
                break
            lam = lam_restart if lam == 0.0 else lam * opts.damping_increase
            if lam > _MAX_DAMPING:
                trace.termination = "stalled"
                raise LsqStalled(
                    "no acceptable step up to the damping growth limit", trace
                )

        predicted = ssq - float((r + jac @ step) @ (r + jac @ step))
        gain = (ssq - ssq_new) / predicted if predicted > 0.0 else 0.0
        improvement = ssq - ssq_new
        x, r, ssq = x_new, r_new, ssq_new
        trace.sum_squares.append(ssq)
        trace.dampings.append(lam)
        trace.step_norms.append(step_norm)
        if gain >= _GOOD_GAIN:
            lam_restart = max(lam, opts.initial_damping)
            lam = 0.0
        elif lam == 0.0:
            lam = lam_restart
        else:
            lam = lam / opts.damping_decrease
        if improvement < opts.residual_tolerance * max(ssq, np.finfo(float).tiny):
            trace.termination = "residual_tolerance"
            return x, trace

    trace.termination = "max_iterations"
    return x, trace
