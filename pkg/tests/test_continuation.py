import numpy as np
import pytest

from macolloc.collocation import assemble, residual
from macolloc.continuation import (
    SolveFailure,
    SweepConfig,
    SweepFailure,
    solve_once,
    sweep,
)
from macolloc.poly import CoeffTriangle
from macolloc.problems import MAProblem, exp_problem, quadratic_problem, taylor_start


def test_quadratic_recovery_from_perturbed_start():
    start = CoeffTriangle.from_entries(2, {(2, 0): 0.9, (0, 2): 1.1})
    report = solve_once(quadratic_problem(1.0), 2, start)
    exact = CoeffTriangle.from_entries(2, {(2, 0): 1.0, (0, 2): 1.0})
    assert np.abs(report.coeffs.vec - exact.vec).max() <= 1e-10
    assert report.sum_sq_final <= 1e-20


def test_start_degree_must_match():
    with pytest.raises(ValueError):
        solve_once(quadratic_problem(1.0), 4, CoeffTriangle(2))


def test_degree_zero_pde_rows_are_minus_g():
    p = exp_problem()
    start = CoeffTriangle.from_entries(0, {(0, 0): 1.0})
    report = solve_once(p, 0, start)
    sys = assemble(p, report.points, 0, report.boundary_weight)
    res = residual(sys, report.coeffs)
    dom = report.points.domain_points
    np.testing.assert_allclose(res[: len(dom)], -p.g(dom[:, 0], dom[:, 1]), rtol=1e-15)
    # the optimum constant is the boundary mean, independent of the PDE rows
    f = p.f(report.points.boundary_points[:, 0], report.points.boundary_points[:, 1])
    assert report.coeffs[0, 0] == pytest.approx(f.mean(), rel=1e-8)


def test_final_sum_of_squares_never_exceeds_initial():
    reports = sweep(exp_problem(), SweepConfig(degrees=(0, 2, 4)))
    for rep in reports:
        assert rep.sum_sq_final <= rep.sum_sq_initial + 1e-15


def test_cold_chain_start_is_embedded_previous_optimum():
    reports = sweep(quadratic_problem(1.0), SweepConfig(degrees=(0, 2, 4)))
    np.testing.assert_array_equal(reports[0].start.vec, [1.0])
    np.testing.assert_array_equal(
        reports[1].start.vec, reports[0].coeffs.embed(2).vec
    )
    np.testing.assert_array_equal(
        reports[2].start.vec, reports[1].coeffs.embed(4).vec
    )


def test_taylor_mode_start():
    reports = sweep(
        exp_problem(), SweepConfig(degrees=(2,), start_mode="taylor")
    )
    np.testing.assert_array_equal(reports[0].start.vec, taylor_start(2).vec)


def test_warm_start_preserves_sum_of_squares_on_fixed_points():
    p = quadratic_problem(1.0)
    start = CoeffTriangle.from_entries(2, {(2, 0): 0.5, (0, 2): 1.5})
    report = solve_once(p, 2, start)
    # same point set, trial space enlarged: the embedded optimum must give
    # the same sum of squares up to rounding
    sys4 = assemble(p, report.points, 4, report.boundary_weight)
    res4 = residual(sys4, report.coeffs.embed(4))
    assert float(res4 @ res4) == pytest.approx(report.sum_sq_final, abs=1e-12)


def test_rmse_decreases_along_exp_sweep():
    reports = sweep(exp_problem(), SweepConfig(degrees=(2, 4, 6)))
    rmses = [rep.metrics.rmse_solution for rep in reports]
    assert all(b < a for a, b in zip(rmses, rmses[1:]))


def test_degree_twelve_from_embedded_degree_ten_optimum():
    p = exp_problem()
    best10 = solve_once(p, 10, taylor_start(10)).coeffs
    report = solve_once(p, 12, best10.embed(12))
    assert report.metrics.max_solution <= 1e-5


def test_oversampled_config_builds_denser_grids():
    reports = sweep(
        exp_problem(),
        SweepConfig(degrees=(0, 2), oversample_safety=1.0),
    )
    # degree 0 falls back to the regular grid; degree 2 is oversampled
    assert reports[0].points.domain_points.shape[0] == 9
    assert reports[1].points.domain_points.shape[0] == 81
    assert reports[1].points.h_boundary <= 0.5 / 4 + 1e-15


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(degrees=(4, 2))
    with pytest.raises(ValueError):
        SweepConfig(degrees=())
    with pytest.raises(ValueError):
        SweepConfig(start_mode="warm")


def test_sweep_failure_carries_completed_reports():
    # g blows up on the degree-4 grid (|x| = 1/2) but not on the degree-2 grid
    def g(x, y):
        x = np.asarray(x, dtype=float)
        out = np.full(np.broadcast(x, y).shape, 4.0)
        return np.where(np.abs(np.abs(x) - 0.5) < 1e-12, np.inf, out)

    exact = quadratic_problem(1.0).exact
    problem = MAProblem(g=g, f=exact, exact=exact, name="spiked")
    with pytest.raises(SweepFailure) as info:
        sweep(problem, SweepConfig(degrees=(2, 4)))
    assert len(info.value.reports) == 1
    assert info.value.reports[0].degree == 2
    assert isinstance(info.value.failure, SolveFailure)
    assert info.value.failure.degree == 4
