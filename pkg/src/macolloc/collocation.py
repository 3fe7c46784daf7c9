"""Collocation point sets and the weighted nonlinear residual system.

Domain points sample the closed square, boundary grid points included by
default (the two sets intersect on the boundary; pass
``include_boundary=False`` for interior-only domain points).  Boundary
points are the grid points of the four edges with each corner listed once,
ordered bottom, top, left, right.  Residuals stack all domain rows first
(point order), then all boundary rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .poly import CoeffTriangle, basis_matrices, triangle_size
from .problems import MAProblem

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PointSet:
    """Domain and boundary collocation points with their fill distances.

    ``h_domain`` bounds the distance from any point of the closed square to
    the nearest domain point; ``h_boundary`` does the same on the boundary.
    """

    domain_points: np.ndarray
    boundary_points: np.ndarray
    h_domain: float
    h_boundary: float

    def __post_init__(self):
        for arr in (self.domain_points, self.boundary_points):
            arr.flags.writeable = False


def perimeter_points(nodes) -> np.ndarray:
    """Perimeter of the tensor grid built on ``nodes``, corners listed once.

    Order: bottom edge (x ascending), top edge, left edge interior,
    right edge interior.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    bottom = np.column_stack([nodes, np.full(n, -1.0)])
    top = np.column_stack([nodes, np.full(n, 1.0)])
    left = np.column_stack([np.full(n - 2, -1.0), nodes[1:-1]])
    right = np.column_stack([np.full(n - 2, 1.0), nodes[1:-1]])
    return np.vstack([bottom, top, left, right])


def _grid_point_set(n_cells: int, include_boundary: bool) -> PointSet:
    h = 2.0 / n_cells
    nodes = -1.0 + h * np.arange(n_cells + 1)
    xx, yy = np.meshgrid(nodes, nodes, indexing="ij")
    domain = np.column_stack([xx.ravel(), yy.ravel()])
    if include_boundary:
        h_domain = h / _SQRT2
    else:
        domain = domain[np.max(np.abs(domain), axis=1) < 1.0]
        # the square's corners are h*sqrt(2) from the nearest interior node
        h_domain = h * _SQRT2
    return PointSet(domain, perimeter_points(nodes), h_domain, h / 2.0)


def regular_points(degree: int, include_boundary: bool = True) -> PointSet:
    """Tensor grid with spacing 2/degree (spacing 1 for degree 0)."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    n_cells = degree if degree > 0 else 2
    return _grid_point_set(n_cells, include_boundary)


def oversampled_points(
    degree: int, safety: float = 1.0, include_boundary: bool = True
) -> PointSet:
    """Grid refined until h_boundary is at most (safety/2) / degree^2.

    The spacing is 2 / ceil(2 degree^2 / safety), the coarsest integer
    subdivision with h <= safety / degree^2, so h_boundary = h/2 meets the
    Markov-style stability budget for degree-`degree` polynomials.
    """
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    if not 0.0 < safety <= 1.0:
        raise ValueError(f"safety must lie in (0, 1], got {safety}")
    n_cells = math.ceil(2.0 * degree * degree / safety)
    return _grid_point_set(n_cells, include_boundary)


@dataclass(frozen=True)
class ResidualSystem:
    """Precomputed basis tables and data samples of one collocation system.

    The residual and its Jacobian are pure functions of the coefficient
    vector given this object.  Rows i of the stacked derivative tables are
    the flat basis tables of domain point i; ``value_boundary`` holds the
    value tables of the boundary points.
    """

    degree: int
    problem: MAProblem
    points: PointSet
    boundary_weight: float
    dxx_domain: np.ndarray
    dxy_domain: np.ndarray
    dyy_domain: np.ndarray
    value_boundary: np.ndarray
    g_domain: np.ndarray
    f_boundary: np.ndarray

    @property
    def n_unknowns(self) -> int:
        return triangle_size(self.degree)

    @property
    def n_residuals(self) -> int:
        return self.g_domain.size + self.f_boundary.size

    @property
    def n_domain(self) -> int:
        return self.g_domain.size


def assemble(
    problem: MAProblem,
    points: PointSet,
    degree: int,
    boundary_weight: float = 10.0,
) -> ResidualSystem:
    """Precompute tables and data samples for the weighted system.

    The boundary weight multiplies each boundary residual before squaring;
    the default is 10.
    """
    if boundary_weight <= 0.0:
        raise ValueError(f"boundary_weight must be positive, got {boundary_weight}")
    dom = points.domain_points
    bnd = points.boundary_points
    _, dxx, dxy, dyy = basis_matrices(dom, degree)
    value_b, _, _, _ = basis_matrices(bnd, degree)
    g_dom = np.asarray(problem.g(dom[:, 0], dom[:, 1]), dtype=float)
    f_bnd = np.asarray(problem.f(bnd[:, 0], bnd[:, 1]), dtype=float)
    return ResidualSystem(
        degree=degree,
        problem=problem,
        points=points,
        boundary_weight=boundary_weight,
        dxx_domain=dxx,
        dxy_domain=dxy,
        dyy_domain=dyy,
        value_boundary=value_b,
        g_domain=g_dom,
        f_boundary=f_bnd,
    )


def _check_degree(system: ResidualSystem, coeffs: CoeffTriangle):
    if coeffs.degree != system.degree:
        raise ValueError(
            f"degree mismatch: coefficients {coeffs.degree}, system {system.degree}"
        )


def _residual_vec(system: ResidualSystem, v: np.ndarray) -> np.ndarray:
    uxx = system.dxx_domain @ v
    uyy = system.dyy_domain @ v
    uxy = system.dxy_domain @ v
    pde = uxx * uyy - uxy**2 - system.g_domain
    bnd = system.boundary_weight * (system.f_boundary - system.value_boundary @ v)
    return np.concatenate([pde, bnd])


def _jacobian_mat(system: ResidualSystem, v: np.ndarray) -> np.ndarray:
    uxx = system.dxx_domain @ v
    uyy = system.dyy_domain @ v
    uxy = system.dxy_domain @ v
    pde_rows = (
        system.dxx_domain * uyy[:, None]
        + system.dyy_domain * uxx[:, None]
        - 2.0 * system.dxy_domain * uxy[:, None]
    )
    bnd_rows = -system.boundary_weight * system.value_boundary
    return np.vstack([pde_rows, bnd_rows])


def residual(system: ResidualSystem, coeffs: CoeffTriangle) -> np.ndarray:
    """Stacked residual: uxx uyy - uxy^2 - g on domain rows, w (f - u) on boundary rows."""
    _check_degree(system, coeffs)
    return _residual_vec(system, coeffs.vec)


def jacobian(system: ResidualSystem, coeffs: CoeffTriangle) -> np.ndarray:
    """Analytic derivative of :func:`residual` in the flat coefficient vector.

    Domain row i, column k: dxx_i[k] uyy_i + uxx_i dyy_i[k] - 2 uxy_i dxy_i[k];
    boundary row j, column k: -w value_j[k].
    """
    _check_degree(system, coeffs)
    return _jacobian_mat(system, coeffs.vec)
