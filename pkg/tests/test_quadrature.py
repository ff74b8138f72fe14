import math

import numpy as np
import pytest

from wgpoly.quadrature import DegenerateCell, cell_rule, edge_rule

UNIT_TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def tri_monomial(a, b):
    # exact integral of x^a y^b over the unit triangle
    return (math.factorial(a) * math.factorial(b)
            / math.factorial(a + b + 2))


def square_monomial(a, b):
    return 1.0 / ((a + 1) * (b + 1))


def test_edge_rule_degree1_is_midpoint():
    r = edge_rule([0.0, 0.0], [1.0, 0.0], 1)
    assert len(r.weights) == 1
    assert r.weights[0] == pytest.approx(1.0)
    assert r.params[0] == pytest.approx(0.5)


def test_edge_rule_t_squared():
    r = edge_rule([0.0, 0.0], [1.0, 0.0], 2)
    assert (r.weights * r.params ** 2).sum() == pytest.approx(1 / 3,
                                                              abs=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_edge_rule_gauss_degree(n):
    # an n-point rule integrates t^(2n-1) exactly
    r = edge_rule([0.0, 0.0], [1.0, 0.0], 2 * n - 1)
    assert len(r.weights) == n
    got = (r.weights * r.params ** (2 * n - 1)).sum()
    assert got == pytest.approx(1.0 / (2 * n), abs=1e-14)


def test_edge_rule_weights_sum_to_length():
    r = edge_rule([0.2, 0.1], [0.5, 0.5], 7)
    assert r.weights.sum() == pytest.approx(0.5)


def test_cell_rule_area():
    r = cell_rule(UNIT_TRIANGLE, 0)
    assert r.weights.sum() == pytest.approx(0.5, abs=1e-14)


def test_cell_rule_xy_triangle():
    r = cell_rule(UNIT_TRIANGLE, 3)
    got = (r.weights * r.points[:, 0] * r.points[:, 1]).sum()
    assert got == pytest.approx(1 / 24, abs=1e-14)


def test_cell_rule_x2y2_square():
    r = cell_rule(UNIT_SQUARE, 4)
    got = (r.weights * r.points[:, 0] ** 2 * r.points[:, 1] ** 2).sum()
    assert got == pytest.approx(1 / 9, abs=1e-14)


@pytest.mark.parametrize("cell,exact", [(UNIT_TRIANGLE, tri_monomial),
                                        (UNIT_SQUARE, square_monomial)])
@pytest.mark.parametrize("degree", range(0, 25, 4))
def test_exactness_sweep(cell, exact, degree):
    # random polynomials of each total degree up to 2*j_max
    rng = np.random.default_rng(degree)
    r = cell_rule(cell, degree)
    assert (r.weights > 0).all()
    coeffs = {(a, b): rng.standard_normal()
              for a in range(degree + 1) for b in range(degree + 1 - a)}
    want = sum(c * exact(a, b) for (a, b), c in coeffs.items())
    got = sum(c * (r.weights * r.points[:, 0] ** a
                   * r.points[:, 1] ** b).sum()
              for (a, b), c in coeffs.items())
    assert got == pytest.approx(want, rel=1e-12)


def test_degenerate_cell_raises():
    flat = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 1e-18]])
    with pytest.raises((DegenerateCell, ZeroDivisionError)):
        cell_rule(flat, 2)
