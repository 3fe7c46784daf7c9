"""Bivariate polynomials of bounded total degree with triangular coefficients.

A polynomial u(x, y) = sum_{m+n<=M} c[m,n] x^m y^n is represented by its
triangular coefficient array {c[m,n] : m+n <= M}.  The canonical flat
layout orders entries by total degree m+n ascending, then by m ascending
(graded lexicographic), so the coefficients of any lower degree form a
prefix of the flat vector at any higher degree.  Values and second
derivatives at a point reduce to dot products with precomputed monomial
tables.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np

# Raw monomial bases condition badly as the degree grows; past this degree
# a warning is emitted but the computation proceeds.
DEGREE_SOFT_CAP = 20


@lru_cache(maxsize=None)
def graded_indices(degree: int) -> tuple[tuple[int, int], ...]:
    """All (m, n) with m+n <= degree, ordered by m+n ascending then m ascending."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    return tuple((m, s - m) for s in range(degree + 1) for m in range(s + 1))


def triangle_size(degree: int) -> int:
    """Number of coefficients of a total-degree-`degree` polynomial."""
    return (degree + 1) * (degree + 2) // 2


@lru_cache(maxsize=None)
def _index_lookup(degree: int) -> dict:
    return {mn: k for k, mn in enumerate(graded_indices(degree))}


def flat_index(degree: int, m: int, n: int) -> int:
    """Position of coefficient (m, n) in the flat graded-lex vector."""
    try:
        return _index_lookup(degree)[(m, n)]
    except KeyError:
        raise IndexError(
            f"(m, n) = ({m}, {n}) is outside the degree-{degree} triangle"
        ) from None


class CoeffTriangle:
    """Immutable triangular coefficient array of a bivariate polynomial.

    The flat vector ``vec`` (graded-lex order) is the canonical view used
    by the least-squares solver; :meth:`to_matrix` exposes the
    (M+1) x (M+1) triangle for assembly-style access.
    """

    __slots__ = ("degree", "vec")

    def __init__(self, degree: int, vec=None):
        if degree < 0:
            raise ValueError(f"degree must be >= 0, got {degree}")
        if degree > DEGREE_SOFT_CAP:
            warnings.warn(
                f"degree {degree} exceeds the soft cap {DEGREE_SOFT_CAP}; the raw "
                "monomial basis is badly conditioned at this degree",
                UserWarning,
                stacklevel=2,
            )
        size = triangle_size(degree)
        if vec is None:
            v = np.zeros(size)
        else:
            v = np.array(vec, dtype=float).reshape(-1)
            if v.size != size:
                raise ValueError(
                    f"degree {degree} needs {size} coefficients, got {v.size}"
                )
        v.flags.writeable = False
        self.degree = degree
        self.vec = v

    @classmethod
    def from_entries(cls, degree: int, entries: dict) -> "CoeffTriangle":
        """Build from a {(m, n): value} mapping; unlisted entries are zero."""
        vec = np.zeros(triangle_size(degree))
        for (m, n), value in entries.items():
            vec[flat_index(degree, m, n)] = value
        return cls(degree, vec)

    @classmethod
    def from_matrix(cls, matrix) -> "CoeffTriangle":
        """Inverse of :meth:`to_matrix`; entries with m+n > degree must be zero."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
        degree = matrix.shape[0] - 1
        for m in range(degree + 1):
            for n in range(degree + 1):
                if m + n > degree and matrix[m, n] != 0.0:
                    raise ValueError(
                        f"entry ({m}, {n}) lies outside the degree-{degree} triangle"
                    )
        vec = np.array([matrix[m, n] for m, n in graded_indices(degree)])
        return cls(degree, vec)

    def to_matrix(self) -> np.ndarray:
        """Dense (degree+1) x (degree+1) array with entry [m, n] = c[m,n]."""
        mat = np.zeros((self.degree + 1, self.degree + 1))
        for k, (m, n) in enumerate(graded_indices(self.degree)):
            mat[m, n] = self.vec[k]
        return mat

    def embed(self, new_degree: int) -> "CoeffTriangle":
        """The same polynomial viewed in the total-degree-`new_degree` space."""
        if new_degree < self.degree:
            raise ValueError(
                f"cannot embed degree {self.degree} into smaller degree {new_degree}"
            )
        vec = np.zeros(triangle_size(new_degree))
        vec[: self.vec.size] = self.vec
        return CoeffTriangle(new_degree, vec)

    def __getitem__(self, mn) -> float:
        m, n = mn
        return float(self.vec[flat_index(self.degree, m, n)])

    def __repr__(self) -> str:
        return f"CoeffTriangle(degree={self.degree}, size={self.vec.size})"


class BasisTables:
    """Monomial values and second derivatives at one point, flat graded-lex.

    With (m, n) = graded_indices(degree)[k]:

    * ``value[k]`` = x^m y^n
    * ``dxx[k]``   = m (m-1) x^(m-2) y^n          (zero for m < 2)
    * ``dxy[k]``   = m n x^(m-1) y^(n-1)          (zero for m < 1 or n < 1)
    * ``dyy[k]``   = n (n-1) x^m y^(n-2)          (zero for n < 2)

    so the dot product of a coefficient vector with each table gives the
    polynomial value and its second derivatives at ``point``.
    """

    __slots__ = ("point", "degree", "value", "dxx", "dxy", "dyy")

    def __init__(self, point, degree, value, dxx, dxy, dyy):
        self.point = (float(point[0]), float(point[1]))
        self.degree = degree
        for name, arr in (("value", value), ("dxx", dxx), ("dxy", dxy), ("dyy", dyy)):
            arr = np.array(arr, dtype=float).reshape(-1)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __setattr__(self, name, value):
        if name in ("value", "dxx", "dxy", "dyy") and hasattr(self, "dyy"):
            raise AttributeError("BasisTables is immutable")
        object.__setattr__(self, name, value)

    def __repr__(self) -> str:
        return f"BasisTables(point={self.point}, degree={self.degree})"


def basis_matrices(points, degree: int):
    """Stacked basis tables for many points at once.

    Returns four (n_points, n_coefficients) arrays ``(value, dxx, dxy, dyy)``
    whose row i is the flat table of point i.  Monomial powers are built by
    iterative multiplication.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    npts = pts.shape[0]
    xp = np.ones((npts, degree + 1))
    yp = np.ones((npts, degree + 1))
    for k in range(1, degree + 1):
        xp[:, k] = xp[:, k - 1] * x
        yp[:, k] = yp[:, k - 1] * y
    indices = graded_indices(degree)
    ncoef = len(indices)
    value = np.empty((npts, ncoef))
    dxx = np.zeros((npts, ncoef))
    dxy = np.zeros((npts, ncoef))
    dyy = np.zeros((npts, ncoef))
    for k, (m, n) in enumerate(indices):
        value[:, k] = xp[:, m] * yp[:, n]
        if m >= 2:
            dxx[:, k] = m * (m - 1) * xp[:, m - 2] * yp[:, n]
        if m >= 1 and n >= 1:
            dxy[:, k] = m * n * xp[:, m - 1] * yp[:, n - 1]
        if n >= 2:
            dyy[:, k] = n * (n - 1) * xp[:, m] * yp[:, n - 2]
    return value, dxx, dxy, dyy


def build_tables(point, degree: int) -> BasisTables:
    """Basis tables of a single point."""
    x, y = float(point[0]), float(point[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"point must be finite, got ({x}, {y})")
    value, dxx, dxy, dyy = basis_matrices([(x, y)], degree)
    return BasisTables((x, y), degree, value[0], dxx[0], dxy[0], dyy[0])


def evaluate(coeffs: CoeffTriangle, tables: BasisTables):
    """(u, uxx, uxy, uyy) of the polynomial at the table's point."""
    if coeffs.degree != tables.degree:
        raise ValueError(
            f"degree mismatch: coefficients {coeffs.degree}, tables {tables.degree}"
        )
    v = coeffs.vec
    return (
        float(v @ tables.value),
        float(v @ tables.dxx),
        float(v @ tables.dxy),
        float(v @ tables.dyy),
    )
