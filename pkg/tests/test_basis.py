import numpy as np
import pytest

from wgpoly.basis import (CellBasis, EdgeBasis, VectorCellBasis,
                          eval_cell_basis, eval_divergence,
                          eval_normal_trace, graded_lex_exponents, space_dim)


def test_dimensions():
    assert space_dim(0) == 1
    assert space_dim(2) == 6
    cb = CellBasis(2, np.zeros(2), 1.0)
    assert cb.dim == 6
    assert VectorCellBasis(cb).dim == 12
    assert EdgeBasis(3).dim == 4


def test_graded_lex_order_stable():
    exps = graded_lex_exponents(2)
    assert exps.tolist() == [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]


def test_degree0_is_one():
    cb = CellBasis(0, np.array([0.3, 0.4]), 2.0)
    assert eval_cell_basis(cb, [0.9, -1.2]).tolist() == [1.0]


def test_degree1_vanishes_at_center():
    cb = CellBasis(1, np.array([0.25, 0.75]), 0.5)
    np.testing.assert_allclose(eval_cell_basis(cb, [0.25, 0.75]),
                               [1.0, 0.0, 0.0])


def test_eval_matches_monomials():
    center, scale = np.array([0.5, 0.25]), 2.0
    cb = CellBasis(3, center, scale)
    pt = np.array([1.1, -0.7])
    xh, yh = (pt - center) / scale
    expected = [xh ** a * yh ** b for a, b in cb.exponents]
    np.testing.assert_allclose(eval_cell_basis(cb, pt), expected, atol=1e-14)


def test_divergence_constant_fields_zero():
    vb = VectorCellBasis(CellBasis(2, np.zeros(2), 1.0))
    div = eval_divergence(vb, [0.3, 0.9])
    assert div[0] == 0.0 and div[6] == 0.0


def test_divergence_linear_field():
    h = 0.5
    vb = VectorCellBasis(CellBasis(1, np.array([0.2, 0.3]), h))
    div = eval_divergence(vb, [0.9, 0.1])
    # q = ((x-xc)/h, 0) has divergence 1/h everywhere
    assert div[1] == pytest.approx(1.0 / h)
    assert div[5] == pytest.approx(1.0 / h)


def test_divergence_finite_differences():
    rng = np.random.default_rng(7)
    h = 0.8
    cb = CellBasis(4, np.array([0.4, 0.6]), h)
    vb = VectorCellBasis(cb)
    eps = 1e-5 * h
    for pt in rng.uniform(0, 1, size=(10, 2)):
        dx = (cb.eval(pt + [eps, 0]) - cb.eval(pt - [eps, 0])) / (2 * eps)
        dy = (cb.eval(pt + [0, eps]) - cb.eval(pt - [0, eps])) / (2 * eps)
        fd = np.concatenate([dx[0], dy[0]])
        div = eval_divergence(vb, pt)
        np.testing.assert_allclose(div, fd, rtol=1e-6, atol=1e-6)


def test_normal_trace_constant_field():
    vb = VectorCellBasis(CellBasis(0, np.zeros(2), 1.0))
    n = np.array([1.0, 1.0]) / np.sqrt(2.0)
    tr = eval_normal_trace(vb, n, [0.5, 0.5])
    # q=(1,0) and q=(0,1) against the hypotenuse normal
    assert tr[0] == pytest.approx(1 / np.sqrt(2.0))
    assert tr[1] == pytest.approx(1 / np.sqrt(2.0))
    down = eval_normal_trace(vb, [0.0, -1.0], [0.5, 0.0])
    assert down[1] == pytest.approx(-1.0)


def test_normal_traces_opposite_across_edge():
    vb = VectorCellBasis(CellBasis(2, np.array([0.5, 0.5]), 1.0))
    pt = [0.25, 0.25]
    n = np.array([1.0, 1.0]) / np.sqrt(2.0)
    np.testing.assert_allclose(eval_normal_trace(vb, n, pt),
                               -eval_normal_trace(vb, -n, pt), atol=1e-14)


def test_edge_basis_orthogonal():
    eb = EdgeBasis(4)
    t, w = np.polynomial.legendre.leggauss(8)
    t, w = (t + 1) / 2, w / 2
    vals = eb.eval(t)
    G = vals.T @ (w[:, None] * vals)
    expected = np.diag(1.0 / (2 * np.arange(5) + 1.0))
    np.testing.assert_allclose(G, expected, atol=1e-14)


def test_degree_cap():
    with pytest.raises(ValueError):
        CellBasis(13, np.zeros(2), 1.0)
