"""Dirichlet problem instances for the planar Monge-Ampere equation.

An instance prescribes det D^2 u = u_xx u_yy - u_xy^2 = g on the closed
square [-1, 1]^2 together with u = f on its boundary.  All data callables
take (x, y) as scalars or numpy arrays and evaluate elementwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .poly import CoeffTriangle, graded_indices, triangle_size


@dataclass(frozen=True)
class MAProblem:
    """Right-hand side ``g``, Dirichlet data ``f``, optional exact solution.

    ``g`` should be strictly positive on the closed square for the convex
    solution branch to exist.  This is advisory only: construction samples
    g on a coarse grid and warns on a nonpositive value, but never raises,
    since branch selection is left to the optimizer's starting point.
    """

    g: Callable
    f: Callable
    exact: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        t = np.linspace(-1.0, 1.0, 7)
        xx, yy = np.meshgrid(t, t)
        if np.min(self.g(xx, yy)) <= 0.0:
            warnings.warn(
                "g is not strictly positive on the sampled grid; the convex "
                "solution branch may not exist",
                UserWarning,
                stacklevel=2,
            )


def exp_problem() -> MAProblem:
    """Manufactured instance with exact solution exp((x^2 + y^2)/2).

    With r = (x^2+y^2)/2 the second derivatives are uxx = e^r (1 + x^2),
    uyy = e^r (1 + y^2), uxy = e^r x y, so the Hessian determinant is the
    closed form g(x, y) = exp(x^2 + y^2) (1 + x^2 + y^2).
    """

    def exact(x, y):
        return np.exp(0.5 * (x * x + y * y))

    def g(x, y):
        s = x * x + y * y
        return np.exp(s) * (1.0 + s)

    return MAProblem(g=g, f=exact, exact=exact, name="exp")


def quadratic_problem(a: float = 1.0) -> MAProblem:
    """Instance with exact solution a (x^2 + y^2) and constant g = 4 a^2.

    The solution lies inside the degree-2 trial space, so the solver must
    recover it exactly; used as the exact-recovery fixture.  Requires
    a > 0 (the convex branch needs a positive determinant).
    """
    if a <= 0.0:
        raise ValueError(f"quadratic coefficient must be positive, got {a}")

    def exact(x, y):
        return a * (x * x + y * y)

    def g(x, y):
        return np.full(np.broadcast(x, y).shape, 4.0 * a * a)

    return MAProblem(g=g, f=exact, exact=exact, name="quadratic")


def taylor_start(degree: int) -> CoeffTriangle:
    """Total-degree truncation of the series of exp((x^2 + y^2)/2).

    Expanding exp(r) with r = (x^2+y^2)/2 gives
    c[m, n] = 1 / (2^((m+n)/2) (m/2)! (n/2)!) for m, n both even and
    m+n <= degree, zero otherwise.
    """
    vec = np.zeros(triangle_size(degree))
    for k, (m, n) in enumerate(graded_indices(degree)):
        if m % 2 == 0 and n % 2 == 0:
            vec[k] = 1.0 / (
                2 ** ((m + n) // 2) * math.factorial(m // 2) * math.factorial(n // 2)
            )
    return CoeffTriangle(degree, vec)
