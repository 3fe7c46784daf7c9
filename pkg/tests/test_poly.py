import numpy as np
import pytest

from macolloc.poly import (
    CoeffTriangle,
    basis_matrices,
    build_tables,
    evaluate,
    flat_index,
    graded_indices,
    triangle_size,
)


def test_tables_at_origin():
    t = build_tables((0.0, 0.0), 2)
    expected_value = np.zeros(6)
    expected_value[flat_index(2, 0, 0)] = 1.0
    np.testing.assert_array_equal(t.value, expected_value)
    assert t.dxx[flat_index(2, 2, 0)] == 2.0
    assert t.dyy[flat_index(2, 0, 2)] == 2.0
    # the (1, 1) mixed entry is the constant 1; every other one vanishes
    assert t.dxy[flat_index(2, 1, 1)] == 1.0
    assert np.count_nonzero(t.dxy) == 1
    assert np.count_nonzero(t.dxx) == 1
    assert np.count_nonzero(t.dyy) == 1


def test_tables_at_ones():
    for degree in (0, 1, 3, 7):
        t = build_tables((1.0, 1.0), degree)
        np.testing.assert_array_equal(t.value, np.ones(triangle_size(degree)))


def test_tables_mixed_point():
    t = build_tables((0.5, -0.5), 2)
    assert t.value[flat_index(2, 1, 1)] == -0.25
    assert t.dxy[flat_index(2, 1, 1)] == 1.0
    assert t.dxx[flat_index(2, 2, 0)] == 2.0


def test_tables_reject_nonfinite_point():
    with pytest.raises(ValueError):
        build_tables((np.nan, 0.0), 2)
    with pytest.raises(ValueError):
        build_tables((0.0, np.inf), 1)


def test_evaluate_constant():
    c = CoeffTriangle.from_entries(3, {(0, 0): 1.0})
    t = build_tables((0.37, -0.81), 3)
    assert evaluate(c, t) == (1.0, 0.0, 0.0, 0.0)


def test_evaluate_sum_of_squares_poly():
    c = CoeffTriangle.from_entries(2, {(2, 0): 1.0, (0, 2): 1.0})
    t = build_tables((0.3, -0.7), 2)
    u, uxx, uxy, uyy = evaluate(c, t)
    assert u == pytest.approx(0.58)
    assert (uxx, uxy, uyy) == (2.0, 0.0, 2.0)


def test_evaluate_quadratic_series_truncation():
    c = CoeffTriangle.from_entries(2, {(0, 0): 1.0, (2, 0): 0.5, (0, 2): 0.5})
    t = build_tables((1.0, 1.0), 2)
    u, uxx, uxy, uyy = evaluate(c, t)
    assert (u, uxx, uxy, uyy) == (2.0, 1.0, 0.0, 1.0)


def test_evaluate_degree_mismatch():
    c = CoeffTriangle(2)
    t = build_tables((0.0, 0.0), 3)
    with pytest.raises(ValueError):
        evaluate(c, t)


def test_embed_constant():
    c = CoeffTriangle.from_entries(0, {(0, 0): 1.0})
    e = c.embed(2)
    assert e.degree == 2
    np.testing.assert_array_equal(e.vec, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0])


def test_embed_preserves_polynomial():
    rng = np.random.default_rng(7)
    c = CoeffTriangle(4, rng.uniform(-1, 1, triangle_size(4)))
    e = c.embed(8)
    for x, y in rng.uniform(-1, 1, size=(20, 2)):
        low = evaluate(c, build_tables((x, y), 4))
        high = evaluate(e, build_tables((x, y), 8))
        np.testing.assert_allclose(high, low, rtol=1e-14, atol=1e-14)


def test_embed_composition():
    rng = np.random.default_rng(8)
    c = CoeffTriangle(3, rng.uniform(-1, 1, triangle_size(3)))
    np.testing.assert_array_equal(c.embed(5).embed(7).vec, c.embed(7).vec)


def test_embed_rejects_smaller_degree():
    with pytest.raises(ValueError):
        CoeffTriangle(4).embed(2)


def test_index_order_is_bijection():
    for degree in range(21):
        idx = graded_indices(degree)
        assert len(idx) == triangle_size(degree)
        assert len(set(idx)) == len(idx)
        assert all(m + n <= degree for m, n in idx)
        # graded: total degree ascending, then m ascending
        keys = [(m + n, m) for m, n in idx]
        assert keys == sorted(keys)
        for k, (m, n) in enumerate(idx):
            assert flat_index(degree, m, n) == k


def test_triangle_matrix_round_trip():
    rng = np.random.default_rng(3)
    c = CoeffTriangle(5, rng.normal(size=triangle_size(5)))
    back = CoeffTriangle.from_matrix(c.to_matrix())
    assert back.degree == c.degree
    np.testing.assert_array_equal(back.vec, c.vec)


def test_from_matrix_rejects_out_of_triangle_entries():
    mat = np.zeros((3, 3))
    mat[2, 2] = 1.0
    with pytest.raises(ValueError):
        CoeffTriangle.from_matrix(mat)


def test_getitem_and_inadmissible_index():
    c = CoeffTriangle.from_entries(2, {(1, 1): 3.0})
    assert c[1, 1] == 3.0
    with pytest.raises(IndexError):
        c[2, 1]
    with pytest.raises(IndexError):
        CoeffTriangle.from_entries(2, {(3, 0): 1.0})


def test_evaluate_is_linear_in_coefficients():
    rng = np.random.default_rng(11)
    degree = 4
    c1 = CoeffTriangle(degree, rng.normal(size=triangle_size(degree)))
    c2 = CoeffTriangle(degree, rng.normal(size=triangle_size(degree)))
    a, b = 1.7, -0.4
    combo = CoeffTriangle(degree, a * c1.vec + b * c2.vec)
    for x, y in rng.uniform(-1, 1, size=(10, 2)):
        t = build_tables((x, y), degree)
        lhs = np.array(evaluate(combo, t))
        rhs = a * np.array(evaluate(c1, t)) + b * np.array(evaluate(c2, t))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-13, atol=1e-13)


def test_second_derivatives_match_finite_differences():
    # independent oracle: central differences of the value evaluation
    rng = np.random.default_rng(42)
    degree = 5
    h = 1e-4
    for _ in range(10):
        c = CoeffTriangle(degree, rng.uniform(-1, 1, triangle_size(degree)))
        x, y = rng.uniform(-0.9, 0.9, size=2)

        def u(px, py):
            return evaluate(c, build_tables((px, py), degree))[0]

        _, uxx, uxy, uyy = evaluate(c, build_tables((x, y), degree))
        fd_xx = (u(x + h, y) - 2 * u(x, y) + u(x - h, y)) / h**2
        fd_yy = (u(x, y + h) - 2 * u(x, y) + u(x, y - h)) / h**2
        fd_xy = (
            u(x + h, y + h) - u(x + h, y - h) - u(x - h, y + h) + u(x - h, y - h)
        ) / (4 * h**2)
        np.testing.assert_allclose(uxx, fd_xx, rtol=1e-5, atol=1e-7)
        np.testing.assert_allclose(uyy, fd_yy, rtol=1e-5, atol=1e-7)
        np.testing.assert_allclose(uxy, fd_xy, rtol=1e-5, atol=1e-7)


def test_basis_matrices_match_single_point_tables():
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, size=(6, 2))
    value, dxx, dxy, dyy = basis_matrices(pts, 4)
    for i, p in enumerate(pts):
        t = build_tables(p, 4)
        np.testing.assert_array_equal(value[i], t.value)
        np.testing.assert_array_equal(dxx[i], t.dxx)
        np.testing.assert_array_equal(dxy[i], t.dxy)
        np.testing.assert_array_equal(dyy[i], t.dyy)


def test_vectors_are_immutable():
    c = CoeffTriangle(2)
    with pytest.raises(ValueError):
        c.vec[0] = 1.0
    t = build_tables((0.1, 0.2), 2)
    with pytest.raises(ValueError):
        t.value[0] = 5.0


def test_degree_soft_cap_warns():
    with pytest.warns(UserWarning, match="soft cap"):
        CoeffTriangle(21)


def test_wrong_vector_length_rejected():
    with pytest.raises(ValueError):
        CoeffTriangle(2, np.zeros(5))
