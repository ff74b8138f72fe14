"""Scaled polynomial bases on cells and edges.

Cell bases are centroid-centered monomials ((x-xc)/h)^a ((y-yc)/h)^b in
graded-lexicographic order; scaling by the cell diameter keeps the local
Gram matrices uniformly conditioned under refinement.  Edge bases are
shifted Legendre polynomials in the arclength fraction t in [0, 1] along
the edge's canonical orientation.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as npleg

#: monomial conditioning degrades beyond this degree
MAX_DEGREE = 12


def space_dim(degree):
    """Dimension of the polynomials of total degree <= degree in 2D."""
    return (degree + 1) * (degree + 2) // 2


def graded_lex_exponents(degree):
    """(a, b) exponent pairs ordered by total degree, then descending a."""
    return np.array([(d - i, i) for d in range(degree + 1)
                     for i in range(d + 1)], dtype=np.int64)


def _check_degree(degree):
    if not 0 <= degree <= MAX_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_DEGREE}], got {degree}")


@dataclass(frozen=True)
class CellBasis:
    degree: int
    center: np.ndarray
    scale: float
    exponents: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        _check_degree(self.degree)
        object.__setattr__(self, "exponents",
                           graded_lex_exponents(self.degree))

    @property
    def dim(self):
        return space_dim(self.degree)

    def _powers(self, points):
        x = (np.atleast_2d(points) - self.center) / self.scale
        pows = np.ones((self.degree + 1, len(x), 2))
        for d in range(1, self.degree + 1):
            pows[d] = pows[d - 1] * x
        return pows

    def eval(self, points):
        """Basis values at points, shape (npts, dim)."""
        pows = self._powers(points)
        a, b = self.exponents[:, 0], self.exponents[:, 1]
        return (pows[a, :, 0] * pows[b, :, 1]).T

    def grad(self, points):
        """Basis gradients at points, shape (npts, dim, 2)."""
        pows = self._powers(points)
        a, b = self.exponents[:, 0], self.exponents[:, 1]
        out = np.zeros((len(pows[0]), len(a), 2))
        am, bm = np.maximum(a - 1, 0), np.maximum(b - 1, 0)
        out[:, :, 0] = (a / self.scale) * (pows[am, :, 0] * pows[b, :, 1]).T
        out[:, :, 1] = (b / self.scale) * (pows[a, :, 0] * pows[bm, :, 1]).T
        return out


@dataclass(frozen=True)
class EdgeBasis:
    """Shifted Legendre basis in t in [0, 1]; orthogonal in arclength."""

    degree: int

    def __post_init__(self):
        _check_degree(self.degree)

    @property
    def dim(self):
        return self.degree + 1

    def eval(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        vals = npleg.legvander(2.0 * t - 1.0, self.degree)
        return vals


@dataclass(frozen=True)
class VectorCellBasis:
    """[P_j]^2 as pairs (phi_m, 0) then (0, phi_m) over a CellBasis."""

    scalar: CellBasis

    @property
    def degree(self):
        return self.scalar.degree

    @property
    def dim(self):
        return 2 * self.scalar.dim

    def eval(self, points):
        """Values as shape (npts, dim, 2)."""
        phi = self.scalar.eval(points)
        n, m = phi.shape
        out = np.zeros((n, 2 * m, 2))
        out[:, :m, 0] = phi
        out[:, m:, 1] = phi
        return out

    def divergence(self, points):
        """div q for each vector basis function, shape (npts, dim)."""
        g = self.scalar.grad(points)
        return np.concatenate([g[:, :, 0], g[:, :, 1]], axis=1)

    def normal_trace(self, points, normal):
        """q . n at points on an edge with unit outward normal n."""
        phi = self.scalar.eval(points)
        return np.concatenate([phi * normal[0], phi * normal[1]], axis=1)


def eval_cell_basis(basis, point):
    """All cell basis values at one point, in canonical order."""
    return basis.eval(np.atleast_2d(point))[0]


def eval_divergence(basis, point):
    """Divergence of each vector basis function at one point."""
    return basis.divergence(np.atleast_2d(point))[0]


def eval_normal_trace(basis, normal, point):
    """Normal trace q . n of each vector basis function at a point."""
    return basis.normal_trace(np.atleast_2d(point), np.asarray(normal))[0]
