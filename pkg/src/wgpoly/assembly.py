"""Global DOF enumeration, sparse SPD assembly and Dirichlet elimination.

DOF numbering is deterministic: one interior block of dim P_k per cell
(cell index order), then one block of k+1 per edge (edge index order).
Homogeneous Dirichlet data is imposed by symmetric elimination of the
boundary-edge blocks.
"""

import io
from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve

from .basis import CellBasis, EdgeBasis, space_dim
from .mesh import cell_geometry
from .quadrature import cell_rule, edge_rule
from .weakgrad import cell_ops, default_weak_degree


def resolve_j(j_policy, n_edges, k):
    """Per-cell weak-gradient degree: explicit int or 'auto'."""
    if j_policy in (None, "auto"):
        return default_weak_degree(n_edges, k)
    return int(j_policy)


@dataclass(frozen=True)
class DofMap:
    k: int
    n_cells: int
    n_edges: int
    boundary_mask: np.ndarray   # True on DOFs of boundary edges
    free: np.ndarray            # full indices of the free DOFs

    @property
    def cell_block(self):
        return space_dim(self.k)

    @property
    def edge_block(self):
        return self.k + 1

    @property
    def n_dofs(self):
        return self.n_cells * self.cell_block + self.n_edges * self.edge_block

    def cell_offset(self, ci):
        return ci * self.cell_block

    def edge_offset(self, ei):
        return self.n_cells * self.cell_block + ei * self.edge_block

    def cell_dofs(self, mesh, ci):
        """Global DOFs of cell ci: interior block, then edges in loop order."""
        out = np.empty(self.cell_block
                       + len(mesh.cell_edges[ci]) * self.edge_block,
                       dtype=np.int64)
        out[:self.cell_block] = self.cell_offset(ci) + np.arange(
            self.cell_block)
        pos = self.cell_block
        for ei in mesh.cell_edges[ci]:
            out[pos:pos + self.edge_block] = self.edge_offset(int(ei)) \
                + np.arange(self.edge_block)
            pos += self.edge_block
        return out

    def free_blocks(self):
        """(start, size) of each DOF block in free numbering."""
        blocks = []
        pos = 0
        for _ in range(self.n_cells):
            blocks.append((pos, self.cell_block))
            pos += self.cell_block
        mask = self.boundary_mask
        for ei in range(self.n_edges):
            if not mask[self.edge_offset(ei)]:
                blocks.append((pos, self.edge_block))
                pos += self.edge_block
        return blocks


def enumerate_dofs(mesh, k):
    mk, me = space_dim(k), k + 1
    n = mesh.n_cells * mk + mesh.n_edges * me
    mask = np.zeros(n, dtype=bool)
    for ei in np.flatnonzero(mesh.edge_boundary):
        off = mesh.n_cells * mk + ei * me
        mask[off:off + me] = True
    return DofMap(k, mesh.n_cells, mesh.n_edges, mask, np.flatnonzero(~mask))


@dataclass(frozen=True)
class GlobalSystem:
    A: sp.csr_matrix          # free DOFs only, symmetric
    b: np.ndarray
    dofmap: DofMap

    def embed(self, x_free):
        """Free-DOF vector back to full numbering (zeros on the boundary)."""
        full = np.zeros(self.dofmap.n_dofs)
        full[self.dofmap.free] = x_free
        return full


def assemble(mesh, k, j_policy, f):
    """Assemble stiffness and load for the stabilizer-free WG scheme.

    The bilinear form is the sum of per-cell weak-gradient energies; the
    load pairs f with the interior test blocks only (edge blocks get 0).
    """
    dm = enumerate_dofs(mesh, k)
    rows, cols, vals = [], [], []
    b = np.zeros(dm.n_dofs)
    mk = dm.cell_block
    for ci in range(mesh.n_cells):
        j = resolve_j(j_policy, len(mesh.cells[ci]), k)
        ops, geo = cell_ops(mesh, ci, k, j)
        gdofs = dm.cell_dofs(mesh, ci)
        nd = len(gdofs)
        rows.append(np.repeat(gdofs, nd))
        cols.append(np.tile(gdofs, nd))
        vals.append(ops.A.ravel())
        pts = geo.centroid + geo.diameter * ops.rule_pts
        fw = ops.rule_w * f(pts)
        b[gdofs[:mk]] = geo.diameter ** 2 * (ops.phi_k.T @ fw)
    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dm.n_dofs, dm.n_dofs)).tocsr()
    free = dm.free
    A_ff = A[free][:, free]
    return GlobalSystem(A_ff, b[free], dm)


def interpolate(mesh, k, u):
    """Q_h u = {Q_0 u, Q_b u}: cell and edge L2 projections of u.

    Exact for polynomial u of degree <= k; returns a full DOF vector.
    """
    dm = enumerate_dofs(mesh, k)
    out = np.zeros(dm.n_dofs)
    mk = dm.cell_block
    for ci in range(mesh.n_cells):
        geo = cell_geometry(mesh, ci)
        cb = CellBasis(k, geo.centroid, geo.diameter)
        rule = cell_rule(mesh.vertices[mesh.cells[ci]], 2 * k + 2)
        phi = cb.eval(rule.points)
        M = phi.T @ (rule.weights[:, None] * phi)
        mom = phi.T @ (rule.weights * u(rule.points))
        off = dm.cell_offset(ci)
        out[off:off + mk] = cho_solve(cho_factor(M, lower=True), mom)
    eb = EdgeBasis(k)
    scale = 2.0 * np.arange(k + 1) + 1.0
    for ei, (a, b_) in enumerate(mesh.edges):
        pa, pb = mesh.vertices[a], mesh.vertices[b_]
        er = edge_rule(pa, pb, 2 * k + 2)
        psi = eb.eval(er.params)
        length = er.weights.sum()
        off = dm.edge_offset(ei)
        out[off:off + k + 1] = scale / length * (psi.T @ (er.weights
                                                          * u(er.points)))
    return out


def export_matrix_market(A):
    """Symmetric MatrixMarket coordinate text for a sparse matrix."""
    buf = io.BytesIO()
    scipy.io.mmwrite(buf, sp.coo_matrix(A), field="real",
                     symmetry="symmetric")
    return buf.getvalue().decode()
