"""Numerical integration on edges and star-shaped polygonal cells.

Edge rules are classical Gauss-Legendre.  Cell rules fan-triangulate the
polygon from its area centroid and use a collapsed Gauss-Jacobi rule on
each sub-triangle, exact to the requested total degree.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .mesh import polygon_area_centroid


class DegenerateCell(Exception):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray   # (n, 2) physical points
    weights: np.ndarray  # positive, summing to the measure of the domain


@dataclass(frozen=True)
class EdgeQuadratureRule(QuadratureRule):
    params: np.ndarray   # arclength fractions t in [0, 1] of the points


def _num_points(degree):
    return max(1, math.ceil((degree + 1) / 2))


@lru_cache(maxsize=None)
def _gauss01(n):
    """n-point Gauss-Legendre rule on [0, 1]."""
    x, w = roots_legendre(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def _reference_triangle(degree):
    """Rule on the triangle (0,0),(1,0),(0,1) exact to `degree`.

    Collapsed tensor product: Gauss-Jacobi (weight 1-x) in the first
    coordinate absorbs the Duffy-map Jacobian exactly.
    """
    n = _num_points(degree)
    xj, wj = roots_jacobi(n, 1.0, 0.0)
    xi, wi = (xj + 1.0) / 2.0, wj / 4.0
    eta, we = _gauss01(n)
    X, E = np.meshgrid(xi, eta, indexing="ij")
    W = np.outer(wi, we)
    pts = np.column_stack([X.ravel(), (E * (1.0 - X)).ravel()])
    return pts, W.ravel()


def edge_rule(p0, p1, degree):
    """Gauss-Legendre rule on the segment p0 -> p1.

    Params follow the p0 -> p1 direction; weights sum to the edge length.
    """
    p0, p1 = np.asarray(p0, dtype=float), np.asarray(p1, dtype=float)
    t, w = _gauss01(_num_points(degree))
    length = float(np.hypot(*(p1 - p0)))
    pts = p0 + np.outer(t, p1 - p0)
    return EdgeQuadratureRule(pts, w * length, t)


def triangle_rule(v0, v1, v2, degree):
    ref_pts, ref_w = _reference_triangle(degree)
    v0 = np.asarray(v0, dtype=float)
    e1, e2 = np.asarray(v1, dtype=float) - v0, np.asarray(v2, dtype=float) - v0
    jac = e1[0] * e2[1] - e1[1] * e2[0]
    pts = v0 + ref_pts[:, :1] * e1 + ref_pts[:, 1:] * e2
    return QuadratureRule(pts, ref_w * jac)


def cell_rule(polygon, degree):
    """Rule on a star-shaped polygon, exact to `degree`.

    Fan-triangulates from the area centroid; raises DegenerateCell when a
    fan triangle collapses (non-star-shaped or degenerate input).
    """
    polygon = np.asarray(polygon, dtype=float)
    extent = np.ptp(polygon, axis=0).max()
    area, centroid = polygon_area_centroid(polygon)
    if area <= 1e-14 * extent ** 2:
        raise DegenerateCell(f"polygon area {area:.3e} is degenerate "
                             f"relative to extent {extent:.3e}")
    pts, wts = [], []
    for i in range(len(polygon)):
        a, b = polygon[i], polygon[(i + 1) % len(polygon)]
        tri_area = 0.5 * ((a[0] - centroid[0]) * (b[1] - centroid[1])
                          - (a[1] - centroid[1]) * (b[0] - centroid[0]))
        if tri_area < 1e-14 * abs(area):
            raise DegenerateCell(
                f"fan triangle {i} has area {tri_area:.3e} "
                f"(cell area {area:.3e})")
        rule = triangle_rule(centroid, a, b, degree)
        pts.append(rule.points)
        wts.append(rule.weights)
    return QuadratureRule(np.vstack(pts), np.concatenate(wts))
