import numpy as np
import pytest

from macolloc.lsq import (
    LsqDiverged,
    LsqOptions,
    LsqStalled,
    LsqTrace,
    minimize,
)


def linear_residual(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return (lambda x: a @ x - b), (lambda x: a)


class TestLinearProblems:
    def test_identity_system_two_steps(self):
        rf, jf = linear_residual(np.eye(2), [1.0, 2.0])
        x, trace = minimize(rf, jf, np.zeros(2))
        np.testing.assert_allclose(x, [1.0, 2.0], atol=1e-10)
        assert trace.iterations <= 2

    def test_full_rank_rectangular_reaches_gradient_tolerance(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(9, 4))
        b = rng.normal(size=9)
        rf, jf = linear_residual(a, b)
        opts = LsqOptions()
        x, trace = minimize(rf, jf, np.zeros(4), opts)
        assert trace.termination == "gradient_tolerance"
        assert np.abs(a.T @ (a @ x - b)).max() <= opts.gradient_tolerance
        expected, *_ = np.linalg.lstsq(a, b, rcond=None)
        np.testing.assert_allclose(x, expected, atol=1e-9)


def test_rosenbrock():
    def rf(x):
        return np.array([10.0 * (x[1] - x[0] ** 2), 1.0 - x[0]])

    def jf(x):
        return np.array([[-20.0 * x[0], 10.0], [-1.0, 0.0]])

    x, trace = minimize(rf, jf, np.array([-1.2, 1.0]))
    np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-8)
    assert trace.sum_squares[-1] <= 1e-16


def test_zero_residual_at_start():
    a = np.array([[2.0, 0.0], [0.0, 3.0], [1.0, 1.0]])
    x0 = np.array([0.5, -0.25])
    rf, jf = linear_residual(a, a @ x0)
    x, trace = minimize(rf, jf, x0.copy())
    np.testing.assert_array_equal(x, x0)
    assert trace.iterations == 0
    assert trace.termination == "gradient_tolerance"


def test_accepted_sums_of_squares_are_non_increasing():
    def rf(x):
        return np.array([x[0] ** 2 - 2.0, x[0] * x[1] - 1.0, x[1] - 0.3])

    def jf(x):
        return np.array([[2 * x[0], 0.0], [x[1], x[0]], [0.0, 1.0]])

    _, trace = minimize(rf, jf, np.array([3.0, -2.0]))
    ssq = trace.sum_squares
    assert all(b <= a for a, b in zip(ssq, ssq[1:]))
    assert trace.iterations == len(ssq) - 1
    assert len(trace.dampings) == trace.iterations
    assert len(trace.step_norms) == trace.iterations


def test_deterministic_traces():
    def rf(x):
        return np.array([x[0] ** 2 - 2.0, np.sin(x[1]) - 0.5, x[0] + x[1]])

    def jf(x):
        return np.array([[2 * x[0], 0.0], [0.0, np.cos(x[1])], [1.0, 1.0]])

    x1, t1 = minimize(rf, jf, np.array([1.0, 1.0]))
    x2, t2 = minimize(rf, jf, np.array([1.0, 1.0]))
    np.testing.assert_array_equal(x1, x2)
    assert t1.sum_squares == t2.sum_squares
    assert t1.gradient_norms == t2.gradient_norms
    assert t1.dampings == t2.dampings
    assert t1.step_norms == t2.step_norms
    assert t1.termination == t2.termination


def test_nonfinite_residual_at_start_is_value_error():
    with pytest.raises(ValueError):
        minimize(lambda x: np.array([np.inf]), lambda x: np.eye(1), np.zeros(1))


def test_divergence_raises_with_trace():
    calls = {"n": 0}

    def rf(x):
        calls["n"] += 1
        if calls["n"] == 1:
            return np.array([1.0])
        return np.array([np.nan])

    with pytest.raises(LsqDiverged) as info:
        minimize(rf, lambda x: np.array([[1.0]]), np.zeros(1))
    assert isinstance(info.value.trace, LsqTrace)
    assert info.value.trace.termination == "diverged"


def test_unsolvable_damped_system_stalls():
    def jf(x):
        return np.array([[np.nan]])

    with pytest.raises(LsqStalled) as info:
        minimize(lambda x: np.array([1.0 + x[0] ** 2]), jf, np.array([1.0]))
    assert info.value.trace.termination == "stalled"


def test_options_validation():
    with pytest.raises(ValueError):
        LsqOptions(max_iterations=0)
    with pytest.raises(ValueError):
        LsqOptions(gradient_tolerance=0.0)
    with pytest.raises(ValueError):
        LsqOptions(damping_increase=1.0)
    with pytest.raises(ValueError):
        LsqOptions(damping_decrease=0.5)


def test_result_never_worse_than_start():
    rng = np.random.default_rng(9)
    for _ in range(5):
        a = rng.normal(size=(6, 3))
        b = rng.normal(size=6)

        def rf(x):
            return np.concatenate([a @ x - b, [0.1 * (x @ x)]])

        def jf(x):
            return np.vstack([a, 0.2 * x])

        x0 = rng.normal(size=3)
        start = float(np.sum(rf(x0) ** 2))
        x, trace = minimize(rf, jf, x0)
        assert trace.sum_squares[-1] <= start + 1e-15
