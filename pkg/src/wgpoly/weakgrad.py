"""Discrete weak gradient and the local stiffness matrix it induces.

For a weak function v = {v0, vb} on a cell T, the weak gradient is the
unique field in [P_j(T)]^2 whose moments against every test field q match
-(v0, div q)_T + <vb, q.n>_dT.  The local stiffness A_T = B^T G^{-1} B
realizes the energy inner product of two weak functions on T.

Local matrices are computed in centroid-centered coordinates scaled by the
cell diameter; congruent translated cells share one factorization through
a shape cache (A_T is scale invariant, G ~ h^2, B ~ h, D ~ 1/h).
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky

from .basis import CellBasis, EdgeBasis, VectorCellBasis, space_dim
from .mesh import cell_geometry
from .quadrature import cell_rule, edge_rule

GRAM_PIVOT_RTOL = 1e-13


class GramSingular(Exception):
    pass


class DimensionMismatch(Exception):
    pass


def default_weak_degree(n_edges, k):
    """Weak-gradient degree guaranteeing a nonsingular system on n-gons.

    General polygons need j = n + k - 1; on triangles j = k + 1 is
    empirically sufficient and cheaper.  Callers may override.
    """
    if n_edges < 3 or k < 1:
        raise ValueError("need n_edges >= 3 and k >= 1")
    if n_edges == 3:
        return k + 1
    return n_edges + k - 1


def local_dof_count(n_edges, k):
    return space_dim(k) + n_edges * (k + 1)


@dataclass(frozen=True)
class _EdgeInfo:
    """Per-edge quadrature and basis data in normalized coordinates."""

    weights: np.ndarray   # sum to normalized edge length
    params: np.ndarray    # canonical-orientation arclength fractions
    points: np.ndarray    # normalized coordinates on the edge
    psi: np.ndarray       # edge basis values at params, (nq, k+1)
    phi_k: np.ndarray     # interior k-basis values at the edge points
    normal: np.ndarray    # unit outward normal


class _ShapeOps:
    """Scale-free local operator data shared by congruent cells.

    Built on the normalized polygon (vertices - centroid) / h_T with the
    cell's edge orientation flags baked in.
    """

    def __init__(self, polygon, flips, k, j):
        self.k, self.j = k, j
        mk, mj = space_dim(k), space_dim(j)
        self.mk, self.mj = mk, mj
        n_edges = len(polygon)
        self.n_dofs = local_dof_count(n_edges, k)

        center = np.zeros(2)
        cb_k = CellBasis(k, center, 1.0)
        cb_j = CellBasis(j, center, 1.0)
        vb = VectorCellBasis(cb_j)
        eb = EdgeBasis(k)

        rule = cell_rule(polygon, 2 * j)
        self.rule_pts, self.rule_w = rule.points, rule.weights
        self.phi_k = cb_k.eval(rule.points)
        self.phi_j = cb_j.eval(rule.points)
        wphi_j = rule.weights[:, None] * self.phi_j
        self.M_j = self.phi_j.T @ wphi_j
        self.M_k = self.phi_k.T @ (rule.weights[:, None] * self.phi_k)

        L = cholesky(self.M_j, lower=True)
        piv = np.diag(L) ** 2
        if piv.min() < GRAM_PIVOT_RTOL * piv.max():
            raise GramSingular(
                f"Gram pivot ratio {piv.min() / piv.max():.3e} at j={j}")
        self.cho_j = (L, True)
        self.cho_k = cho_factor(self.M_k, lower=True)

        # stiffness of the scalar k-basis, for the discrete H1 seminorm
        g = cb_k.grad(rule.points)
        self.K_k = np.einsum("q,qmd,qnd->mn", rule.weights, g, g)

        # B: rows are vector test functions (x-slot block then y-slot
        # block), columns are local DOFs (interior, then edges in order)
        B = np.zeros((2 * mj, self.n_dofs))
        div = vb.divergence(rule.points)
        B[:, :mk] = -div.T @ (rule.weights[:, None] * self.phi_k)

        self.edges = []
        for i in range(n_edges):
            a, b = polygon[i], polygon[(i + 1) % n_edges]
            er = edge_rule(a, b, 2 * j)
            t = 1.0 - er.params if flips[i] else er.params
            psi = eb.eval(t)
            tang = (b - a) / np.hypot(*(b - a))
            normal = np.array([tang[1], -tang[0]])
            self.edges.append(_EdgeInfo(er.weights, t, er.points, psi,
                                        cb_k.eval(er.points), normal))
            qn = vb.normal_trace(er.points, normal)
            col = mk + i * (k + 1)
            B[:, col:col + k + 1] = qn.T @ (er.weights[:, None] * psi)

        self.B = B

        # The monomial Gram is severely ill conditioned (1e8 on triangles
        # at j=4, 1e13 on hexagons at j=7), which pollutes D = G^{-1}B and
        # the stiffness at fine-level error magnitudes.  Orthonormalize
        # the test basis in the cell Gram metric (two eigh passes bring
        # the transformed Gram within ~1e-13 of identity), solve there,
        # and map D back to monomial coefficients; A is basis invariant.
        lam, V = np.linalg.eigh(self.M_j)
        if lam[0] <= 0.0:
            raise GramSingular(f"Gram not positive definite at j={j}")
        T = V / np.sqrt(lam)
        M1 = T.T @ self.M_j @ T
        lam1, V1 = np.linalg.eigh(M1)
        T = T @ (V1 / np.sqrt(lam1))
        M2 = T.T @ self.M_j @ T
        cho2 = cho_factor(M2, lower=True)
        Bt = np.empty_like(B)
        Bt[:mj] = T.T @ B[:mj]
        Bt[mj:] = T.T @ B[mj:]
        Dt = np.empty_like(B)
        Dt[:mj] = cho_solve(cho2, Bt[:mj])
        Dt[mj:] = cho_solve(cho2, Bt[mj:])
        A = Bt.T @ Dt
        self.A = 0.5 * (A + A.T)
        D = np.empty_like(B)
        D[:mj] = T @ Dt[:mj]
        D[mj:] = T @ Dt[mj:]
        self.D = D

        # finer rule for moments of non-polynomial data (error integrals)
        fine = cell_rule(polygon, 2 * j + 2)
        self.fine_pts, self.fine_w = fine.points, fine.weights
        self.fine_phi_k = cb_k.eval(fine.points)
        self.fine_phi_j = cb_j.eval(fine.points)

    def gram_energy(self, vec_coeffs):
        """(w, w) in the [P_j]^2 Gram metric, normalized coordinates."""
        cx, cy = vec_coeffs[:self.mj], vec_coeffs[self.mj:]
        return float(cx @ self.M_j @ cx + cy @ self.M_j @ cy)

    def project_vector(self, moments):
        """Solve the [P_j]^2 Gram system for both components."""
        out = np.empty_like(moments)
        out[:self.mj] = cho_solve(self.cho_j, moments[:self.mj])
        out[self.mj:] = cho_solve(self.cho_j, moments[self.mj:])
        return out


_shape_cache = {}


def _shape_key(polygon, flips, k, j):
    return (k, j, tuple(np.round(polygon, 12).ravel()), tuple(flips))


def cell_ops(mesh, ci, k, j):
    """Normalized shape operators plus the physical frame of cell ci."""
    loop = mesh.cells[ci]
    geo = cell_geometry(mesh, ci)
    h = geo.diameter
    polygon = (mesh.vertices[loop] - geo.centroid) / h
    flips = tuple(int(loop[i]) > int(loop[(i + 1) % len(loop)])
                  for i in range(len(loop)))
    key = _shape_key(polygon, flips, k, j)
    ops = _shape_cache.get(key)
    if ops is None:
        ops = _ShapeOps(polygon, flips, k, j)
        _shape_cache[key] = ops
    return ops, geo


@dataclass(frozen=True)
class LocalWeakGradient:
    """Physical-space local operator for one cell."""

    cell: int
    k: int
    j: int
    G: np.ndarray   # [P_j]^2 Gram matrix, SPD
    B: np.ndarray   # DOF coefficients -> weak-gradient moments
    D: np.ndarray   # solved operator G^{-1} B
    A: np.ndarray   # local stiffness B^T G^{-1} B, symmetric PSD


def build_local(mesh, ci, k, j=None):
    """Local weak-gradient operator and stiffness for cell ci.

    j defaults to default_weak_degree; inadmissible values (j <= k) are
    accepted so the singular outcomes can be reproduced.
    """
    if j is None:
        j = default_weak_degree(len(mesh.cells[ci]), k)
    ops, geo = cell_ops(mesh, ci, k, j)
    h = geo.diameter
    mj = ops.mj
    G = np.zeros((2 * mj, 2 * mj))
    G[:mj, :mj] = h * h * ops.M_j
    G[mj:, mj:] = h * h * ops.M_j
    return LocalWeakGradient(ci, k, j, G, h * ops.B, ops.D / h, ops.A)


def apply_weak_gradient(op, coeffs):
    """Weak-gradient coefficients D @ coeffs of a local weak function."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (op.D.shape[1],):
        raise DimensionMismatch(
            f"expected {op.D.shape[1]} local coefficients, "
            f"got shape {coeffs.shape}")
    return op.D @ coeffs


def weak_gradient_of_function(mesh, ci, fn, j):
    """Weak gradient of {fn, fn} on cell ci, as [P_j]^2 coefficients.

    fn is inserted with its own traces (not an interpolant), so for smooth
    fn this equals the cell L2 projection of grad fn onto [P_j]^2.
    """
    geo = cell_geometry(mesh, ci)
    cb_j = CellBasis(j, geo.centroid, geo.diameter)
    vb = VectorCellBasis(cb_j)
    rule = cell_rule(mesh.vertices[mesh.cells[ci]], 2 * j + 2)
    div = vb.divergence(rule.points)
    rhs = -div.T @ (rule.weights * fn(rule.points))
    loop = mesh.cells[ci]
    for i in range(len(loop)):
        a, b = mesh.vertices[loop[i]], mesh.vertices[loop[(i + 1) % len(loop)]]
        er = edge_rule(a, b, 2 * j + 2)
        qn = vb.normal_trace(er.points, geo.edge_normals[i])
        rhs += qn.T @ (er.weights * fn(er.points))
    phi_j = cb_j.eval(rule.points)
    M = phi_j.T @ (rule.weights[:, None] * phi_j)
    cho = cho_factor(M, lower=True)
    mj = cb_j.dim
    out = np.empty(2 * mj)
    out[:mj] = cho_solve(cho, rhs[:mj])
    out[mj:] = cho_solve(cho, rhs[mj:])
    return out


def project_gradient(mesh, ci, grad_fn, k, j):
    """L2 projection of a vector field onto [P_j(T)]^2 (coefficients)."""
    ops, geo = cell_ops(mesh, ci, k, j)
    pts = geo.centroid + geo.diameter * ops.fine_pts
    g = grad_fn(pts)
    mom = np.concatenate([
        ops.fine_phi_j.T @ (ops.fine_w * g[:, 0]),
        ops.fine_phi_j.T @ (ops.fine_w * g[:, 1])])
    return ops.project_vector(mom)
