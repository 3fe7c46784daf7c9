"""Error metrics, convergence tables, and empirical stability checks.

The stability checks probe two discrete-to-continuous sup-norm bounds for
trial polynomials: on each boundary edge a degree-M polynomial sampled
with fill distance at most M^-2 / 2 controls the whole edge within a
factor 2 (a Markov-inequality argument), and on the square the Laplacian
sampled on a grid with fill distance at most M^-2 / 4 is controlled by
twice the discrete uxx and uyy seminorms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .collocation import perimeter_points
from .poly import CoeffTriangle, basis_matrices, triangle_size
from .problems import MAProblem

_CHUNK = 40_000
# successive rmse ratios degenerate to 0/0 below this level
RMSE_RATIO_FLOOR = 1e-13


@dataclass(frozen=True)
class ErrorMetrics:
    """Errors of a coefficient triangle against the problem data.

    Solution metrics are None when the problem has no exact solution;
    boundary and PDE metrics are always available.
    """

    rmse_solution: Optional[float]
    max_solution: Optional[float]
    max_boundary: float
    max_pde: float
    grid_resolution: int


def compute_metrics(
    problem: MAProblem, coeffs: CoeffTriangle, grid_resolution: int = 101
) -> ErrorMetrics:
    """Evaluate errors on a uniform grid over the closed square.

    Uses a grid_resolution^2 tensor grid and the 4 (grid_resolution - 1)
    perimeter points of the same grid.
    """
    if grid_resolution < 11:
        raise ValueError(f"grid_resolution must be >= 11, got {grid_resolution}")
    nodes = np.linspace(-1.0, 1.0, grid_resolution)
    xx, yy = np.meshgrid(nodes, nodes, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    value, dxx, dxy, dyy = basis_matrices(pts, coeffs.degree)
    v = coeffs.vec
    u = value @ v
    det = (dxx @ v) * (dyy @ v) - (dxy @ v) ** 2
    max_pde = float(np.abs(det - problem.g(pts[:, 0], pts[:, 1])).max())

    bpts = perimeter_points(nodes)
    bvalue, _, _, _ = basis_matrices(bpts, coeffs.degree)
    max_boundary = float(
        np.abs(bvalue @ v - problem.f(bpts[:, 0], bpts[:, 1])).max()
    )

    rmse = max_sol = None
    if problem.exact is not None:
        err = u - problem.exact(pts[:, 0], pts[:, 1])
        rmse = float(np.sqrt(np.mean(err**2)))
        max_sol = float(np.abs(err).max())
    return ErrorMetrics(rmse, max_sol, max_boundary, max_pde, grid_resolution)


def convexity_fraction(coeffs: CoeffTriangle, grid_resolution: int = 101) -> float:
    """Fraction of grid points where the polynomial's Hessian is positive definite.

    A value of 1.0 indicates the fit landed on the convex solution branch;
    diagnostic only.
    """
    nodes = np.linspace(-1.0, 1.0, grid_resolution)
    xx, yy = np.meshgrid(nodes, nodes, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    _, dxx, dxy, dyy = basis_matrices(pts, coeffs.degree)
    v = coeffs.vec
    uxx = dxx @ v
    det = uxx * (dyy @ v) - (dxy @ v) ** 2
    return float(np.mean((uxx > 0.0) & (det > 0.0)))


# ---------------------------------------------------------------------------
# stability checks


@dataclass(frozen=True)
class StabilityReport:
    """Discrete seminorms, fine-grid suprema, and their ratios for one polynomial."""

    degree: int
    h_boundary: float
    h_domain: float
    seminorm_boundary: float   # max |u| over the discrete boundary points
    seminorm_xx: float         # max |uxx| over the discrete domain points
    seminorm_yy: float
    boundary_sup: float        # max |u| on the aligned fine boundary grid
    laplacian_sup: float       # max |uxx + uyy| on the fine domain grid
    boundary_ratio: float
    laplacian_ratio: float


def _edge_points(t: np.ndarray, edge: int) -> np.ndarray:
    const = np.full(t.size, -1.0 if edge in (0, 2) else 1.0)
    if edge < 2:  # bottom, top
        return np.column_stack([t, const])
    return np.column_stack([const, t])


def _segments(h: float) -> int:
    return int(math.ceil(2.0 / h - 1e-12))


def _edge_maxima(coeff_mat: np.ndarray, degree: int, h_boundary: float):
    """Per-edge sup of |u| on coarse points at spacing <= h_boundary and on
    an aligned fine refinement; returns two (4, n_trials) arrays (fine, coarse)."""
    n_seg = _segments(h_boundary)
    refine = max(2, math.ceil(10 * degree * degree / n_seg))
    coarse_t = np.linspace(-1.0, 1.0, n_seg + 1)
    fine_t = np.linspace(-1.0, 1.0, n_seg * refine + 1)
    fine = np.empty((4, coeff_mat.shape[1]))
    coarse = np.empty((4, coeff_mat.shape[1]))
    for edge in range(4):
        pc, _, _, _ = basis_matrices(_edge_points(coarse_t, edge), degree)
        pf, _, _, _ = basis_matrices(_edge_points(fine_t, edge), degree)
        coarse[edge] = np.abs(pc @ coeff_mat).max(axis=0)
        fine[edge] = np.abs(pf @ coeff_mat).max(axis=0)
    return fine, coarse


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.empty_like(num)
    zero = den == 0.0
    out[~zero] = num[~zero] / den[~zero]
    out[zero] = np.where(num[zero] == 0.0, 1.0, np.inf)
    return out


def _boundary_ratios(coeff_mat: np.ndarray, degree: int, h_boundary: float):
    fine, coarse = _edge_maxima(coeff_mat, degree, h_boundary)
    return _ratio(fine, coarse).max(axis=0)


def _domain_grid(h: float):
    n_seg = _segments(h)
    nodes = np.linspace(-1.0, 1.0, n_seg + 1)
    xx, yy = np.meshgrid(nodes, nodes, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def _chunked_second_deriv_max(pts: np.ndarray, degree: int, coeff_mat: np.ndarray):
    """(max |uxx|, max |uyy|, max |uxx + uyy|) over ``pts``, per coefficient column."""
    n_trials = coeff_mat.shape[1]
    sup_xx = np.zeros(n_trials)
    sup_yy = np.zeros(n_trials)
    sup_lap = np.zeros(n_trials)
    for lo in range(0, pts.shape[0], _CHUNK):
        _, dxx, _, dyy = basis_matrices(pts[lo : lo + _CHUNK], degree)
        uxx = dxx @ coeff_mat
        uyy = dyy @ coeff_mat
        sup_xx = np.maximum(sup_xx, np.abs(uxx).max(axis=0))
        sup_yy = np.maximum(sup_yy, np.abs(uyy).max(axis=0))
        sup_lap = np.maximum(sup_lap, np.abs(uxx + uyy).max(axis=0))
    return sup_xx, sup_yy, sup_lap


def _laplacian_components(coeff_mat: np.ndarray, degree: int, h_domain: float):
    # discrete seminorms on the grid whose fill distance is h_domain
    coarse = _domain_grid(h_domain * math.sqrt(2.0))
    sem_xx, sem_yy, _ = _chunked_second_deriv_max(coarse, degree, coeff_mat)
    # fine surrogate for the continuous sup of the Laplacian
    fine_nodes = np.linspace(-1.0, 1.0, 10 * degree + 1)
    xx, yy = np.meshgrid(fine_nodes, fine_nodes, indexing="ij")
    fine = np.column_stack([xx.ravel(), yy.ravel()])
    _, _, lap_sup = _chunked_second_deriv_max(fine, degree, coeff_mat)
    return sem_xx, sem_yy, lap_sup


def _laplacian_ratios(coeff_mat: np.ndarray, degree: int, h_domain: float):
    sem_xx, sem_yy, lap_sup = _laplacian_components(coeff_mat, degree, h_domain)
    return _ratio(lap_sup, 2.0 * sem_xx + 2.0 * sem_yy)


def _random_coeff_matrix(degree: int, trials: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, size=(triangle_size(degree), trials))


def boundary_stability_check(
    degree: int, trials: int, h_boundary: float, seed: int = 0
) -> float:
    """Worst fine-to-discrete sup ratio of |u| over the boundary edges.

    Samples ``trials`` random coefficient triangles (entries uniform in
    [-1, 1], seeded) at spacing ``h_boundary`` per edge and compares with an
    aligned fine grid of roughly 10 degree^2 points per edge.  Under the
    precondition h_boundary <= degree^-2 / 2 the ratio is guaranteed <= 2.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if h_boundary > 0.5 / degree**2 + 1e-12:
        raise ValueError(
            f"h_boundary={h_boundary} violates the bound {0.5 / degree**2} "
            f"for degree {degree}; the sup-norm guarantee does not apply"
        )
    coeffs = _random_coeff_matrix(degree, trials, seed)
    return float(_boundary_ratios(coeffs, degree, h_boundary).max())


def laplacian_stability_check(
    degree: int, trials: int, h_domain: float, seed: int = 0
) -> float:
    """Worst ratio of the fine-grid sup of |Laplacian u| to twice the sum of
    the discrete uxx and uyy seminorms.

    Under the precondition h_domain <= degree^-2 / 4 the ratio is
    guaranteed <= 1.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if h_domain > 0.25 / degree**2 + 1e-12:
        raise ValueError(
            f"h_domain={h_domain} violates the bound {0.25 / degree**2} "
            f"for degree {degree}; the seminorm bound does not apply"
        )
    coeffs = _random_coeff_matrix(degree, trials, seed)
    return float(_laplacian_ratios(coeffs, degree, h_domain).max())


def stability_report(
    coeffs: CoeffTriangle, h_boundary: float, h_domain: float
) -> StabilityReport:
    """Seminorms, fine-grid suprema, and ratios for one coefficient triangle."""
    mat = coeffs.vec[:, None]
    degree = coeffs.degree
    fine_b, coarse_b = _edge_maxima(mat, degree, h_boundary)
    sem_xx, sem_yy, lap_sup = _laplacian_components(mat, degree, h_domain)
    return StabilityReport(
        degree=degree,
        h_boundary=h_boundary,
        h_domain=h_domain,
        seminorm_boundary=float(coarse_b.max()),
        seminorm_xx=float(sem_xx[0]),
        seminorm_yy=float(sem_yy[0]),
        boundary_sup=float(fine_b.max()),
        laplacian_sup=float(lap_sup[0]),
        boundary_ratio=float(_ratio(fine_b, coarse_b).max()),
        laplacian_ratio=float(
            _ratio(lap_sup, 2.0 * sem_xx + 2.0 * sem_yy)[0]
        ),
    )


def convergence_table(reports) -> list[dict]:
    """Per-degree result rows, in degree order, with successive rmse ratios.

    The ratio rmse(M_k) / rmse(M_{k-1}) is None for the first row, when a
    solution rmse is unavailable, or when either value is below
    ``RMSE_RATIO_FLOOR`` (a 0/0 artifact of exactly representable solutions).
    """
    rows = []
    prev_rmse = None
    for rep in reports:
        metrics = rep.metrics
        rmse = metrics.rmse_solution if metrics is not None else None
        ratio = None
        if (
            rmse is not None
            and prev_rmse is not None
            and rmse >= RMSE_RATIO_FLOOR
            and prev_rmse >= RMSE_RATIO_FLOOR
        ):
            ratio = rmse / prev_rmse
        rows.append(
            {
                "degree": rep.degree,
                "unknowns": triangle_size(rep.degree),
                "K_D": int(rep.points.domain_points.shape[0]),
                "K_B": int(rep.points.boundary_points.shape[0]),
                "rmse_solution": rmse,
                "max_solution": metrics.max_solution if metrics is not None else None,
                "max_boundary": metrics.max_boundary if metrics is not None else None,
                "max_pde": metrics.max_pde if metrics is not None else None,
                "sum_sq_initial": rep.sum_sq_initial,
                "sum_sq_final": rep.sum_sq_final,
                "iterations": rep.trace.iterations,
                "termination": rep.trace.termination,
                "rmse_ratio": ratio,
            }
        )
        prev_rmse = rmse
    return rows
