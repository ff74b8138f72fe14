"""Polygonal meshes on the unit square.

A mesh stores vertices, counter-clockwise cell loops and the derived edge
table.  Edges carry a canonical orientation (low vertex index to high) and
a boundary flag; both grid families used by the convergence studies are
generated here.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

#: absolute geometric tolerance on the unit square
GEOM_TOL = 1e-12

#: guard against accidental memory blowup in the grid generators
MAX_LEVEL = 12


class MeshError(Exception):
    pass


class NonTriangleCell(MeshError):
    pass


class ParseError(MeshError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(MeshError):
    pass


@dataclass(frozen=True)
class Mesh:
    """Immutable polygonal mesh.

    vertices      : (nv, 2) float array
    cells         : tuple of int arrays, CCW vertex loops
    edges         : (ne, 2) int array, each row (lo, hi) with lo < hi
    cell_edges    : tuple of int arrays, edge ids in cell loop order;
                    entry i is the edge from loop vertex i to i+1
    edge_boundary : (ne,) bool array, True if the edge lies on the domain
                    boundary (referenced by exactly one cell)
    h_max         : max cell diameter
    """

    vertices: np.ndarray
    cells: tuple
    edges: np.ndarray
    cell_edges: tuple
    edge_boundary: np.ndarray
    h_max: float

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_cells(self):
        return len(self.cells)

    @classmethod
    def from_cells(cls, vertices, cells):
        """Build a mesh from vertex coordinates and CCW cell loops.

        Edges, boundary flags and h_max are derived.
        """
        vertices = np.asarray(vertices, dtype=float)
        cells = tuple(np.asarray(c, dtype=np.int64) for c in cells)
        edge_index = {}
        edge_count = []
        cell_edges = []
        for loop in cells:
            eids = np.empty(len(loop), dtype=np.int64)
            for i in range(len(loop)):
                a, b = int(loop[i]), int(loop[(i + 1) % len(loop)])
                key = (a, b) if a < b else (b, a)
                ei = edge_index.get(key)
                if ei is None:
                    ei = len(edge_index)
                    edge_index[key] = ei
                    edge_count.append(0)
                edge_count[ei] += 1
                eids[i] = ei
            cell_edges.append(eids)
        edges = np.array(sorted(edge_index, key=edge_index.get),
                         dtype=np.int64).reshape(-1, 2)
        boundary = np.array([c == 1 for c in edge_count], dtype=bool)
        h_max = max((cell_diameter(vertices[c]) for c in cells), default=0.0)
        return cls(vertices, cells, edges, tuple(cell_edges), boundary, h_max)


@dataclass(frozen=True)
class CellGeometry:
    """Per-cell geometric data used by quadrature and local operators."""

    centroid: np.ndarray
    area: float
    diameter: float
    edge_lengths: np.ndarray    # in cell loop order
    edge_normals: np.ndarray    # unit outward normals, loop order
    edge_midpoints: np.ndarray


def polygon_area_centroid(pts):
    """Signed area and area centroid of a closed polygon."""
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return area, np.array([cx, cy])


def cell_diameter(pts):
    """Max pairwise vertex distance; exact for convex polygons."""
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d * d).sum(axis=2)).max())


def cell_geometry(mesh, ci):
    pts = mesh.vertices[mesh.cells[ci]]
    area, centroid = polygon_area_centroid(pts)
    tang = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(tang[:, 0], tang[:, 1])
    # CCW loop: outward normal is the tangent rotated clockwise
    normals = np.column_stack([tang[:, 1], -tang[:, 0]]) / lengths[:, None]
    mids = 0.5 * (pts + np.roll(pts, -1, axis=0))
    return CellGeometry(centroid, float(area), cell_diameter(pts),
                        lengths, normals, mids)


def build_triangle_grid(level):
    """Uniform right-triangle grid on the unit square.

    Level 1 splits the square by the forward-slash diagonal into two
    triangles; each level halves the grid spacing (cell count 2*4**(l-1)).
    """
    if not 1 <= level <= MAX_LEVEL:
        raise ValueError(f"level must be in [1, {MAX_LEVEL}], got {level}")
    m = 2 ** (level - 1)
    ii, jj = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="xy")
    vertices = np.column_stack([ii.ravel() / m, jj.ravel() / m])

    def vid(i, j):
        return j * (m + 1) + i

    cells = []
    for j in range(m):
        for i in range(m):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            cells.append([v00, v10, v01])
            cells.append([v10, v11, v01])
    return Mesh.from_cells(vertices, cells)


def refine_uniform(mesh):
    """Split every triangle into 4 congruent children via edge midpoints."""
    for c in mesh.cells:
        if len(c) != 3:
            raise NonTriangleCell(
                f"refine_uniform needs a triangle mesh, found a {len(c)}-gon")
    verts = [mesh.vertices]
    mid = np.empty(mesh.n_edges, dtype=np.int64)
    n0 = mesh.n_vertices
    mid[:] = n0 + np.arange(mesh.n_edges)
    verts.append(0.5 * (mesh.vertices[mesh.edges[:, 0]]
                        + mesh.vertices[mesh.edges[:, 1]]))
    vertices = np.vstack(verts)
    cells = []
    for loop, eids in zip(mesh.cells, mesh.cell_edges):
        v0, v1, v2 = loop
        m01, m12, m20 = mid[eids[0]], mid[eids[1]], mid[eids[2]]
        cells.extend([[v0, m01, m20], [v1, m12, m01],
                      [v2, m20, m12], [m01, m12, m20]])
    return Mesh.from_cells(vertices, cells)


def build_polygon_grid(level):
    """Deterministic nested polygonal grids on the unit square.

    Level l is the bounded centroid dual of the level-(l+1) triangle grid:
    one cell per triangle-grid vertex, with corners at the centroids of the
    incident triangles, plus boundary-edge midpoints and the vertex itself
    along the domain boundary.  Interior cells are congruent hexagons;
    boundary cells are quads/pentagons/hexagons.  h_max halves per level.
    """
    if not 1 <= level <= MAX_LEVEL - 1:
        raise ValueError(f"level must be in [1, {MAX_LEVEL - 1}], got {level}")
    tri = build_triangle_grid(level + 1)
    cent = np.array([polygon_area_centroid(tri.vertices[c])[1]
                     for c in tri.cells])
    n_tri_cells = tri.n_cells

    vert_cells = [[] for _ in range(tri.n_vertices)]
    for ci, loop in enumerate(tri.cells):
        for v in loop:
            vert_cells[int(v)].append(ci)
    vert_bedges = [[] for _ in range(tri.n_vertices)]
    for ei in np.flatnonzero(tri.edge_boundary):
        a, b = tri.edges[ei]
        vert_bedges[int(a)].append(int(ei))
        vert_bedges[int(b)].append(int(ei))
    edge_mid = 0.5 * (tri.vertices[tri.edges[:, 0]]
                      + tri.vertices[tri.edges[:, 1]])

    # dual vertex numbering: triangle centroids, then boundary-edge
    # midpoints, then boundary vertices (compacted at the end)
    mid_id = {int(ei): n_tri_cells + i
              for i, ei in enumerate(np.flatnonzero(tri.edge_boundary))}
    n_mid = len(mid_id)
    coords = [cent, edge_mid[sorted(mid_id)]]
    vtx_id = {}
    vtx_coords = []

    cells = []
    for v in range(tri.n_vertices):
        items = [(mid_id[ei], edge_mid[ei]) for ei in vert_bedges[v]]
        items += [(ci, cent[ci]) for ci in vert_cells[v]]
        p0 = tri.vertices[v]
        ang = np.array([math.atan2(p[1] - p0[1], p[0] - p0[0])
                        for _, p in items])
        order = np.argsort(ang)
        items = [items[i] for i in order]
        ang = ang[order]
        if vert_bedges[v]:
            # boundary cell: start just after the exterior angular gap and
            # close the loop through the vertex itself
            gaps = np.diff(np.append(ang, ang[0] + 2.0 * math.pi))
            start = (int(np.argmax(gaps)) + 1) % len(items)
            items = items[start:] + items[:start]
            if v not in vtx_id:
                vtx_id[v] = n_tri_cells + n_mid + len(vtx_coords)
                vtx_coords.append(p0)
            items.append((vtx_id[v], p0))
        cells.append([i for i, _ in items])

    if vtx_coords:
        coords.append(np.array(vtx_coords))
    vertices = np.vstack(coords)
    return Mesh.from_cells(vertices, cells)


@dataclass
class ValidationReport:
    defects: list

    @property
    def ok(self):
        return not self.defects


def _segments_intersect(p, q, r, s):
    """Proper intersection test for open segments pq and rs."""
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    d1, d2 = orient(r, s, p), orient(r, s, q)
    d3, d4 = orient(p, q, r), orient(p, q, s)
    return (d1 * d2 < -GEOM_TOL) and (d3 * d4 < -GEOM_TOL)


def validate(mesh):
    """Check every mesh invariant; defects are reported, never raised."""
    defects = []
    nv = mesh.n_vertices
    for ci, loop in enumerate(mesh.cells):
        if len(loop) < 3:
            defects.append(f"cell {ci}: fewer than 3 vertices")
            continue
        if np.any(loop < 0) or np.any(loop >= nv):
            defects.append(f"cell {ci}: vertex index out of range")
            continue
        if len(set(loop.tolist())) != len(loop):
            defects.append(f"cell {ci}: repeated vertex in loop")
            continue
        pts = mesh.vertices[loop]
        area = polygon_area_centroid(pts)[0] if len(loop) >= 3 else 0.0
        if area <= GEOM_TOL:
            defects.append(f"cell {ci}: loop not counter-clockwise "
                           f"(signed area {area:.3e})")
            continue
        n = len(loop)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                if _segments_intersect(pts[i], pts[(i + 1) % n],
                                       pts[j], pts[(j + 1) % n]):
                    defects.append(f"cell {ci}: loop is not simple")
                    break

    # edge-cell incidence recomputed from the loops
    count = np.zeros(mesh.n_edges, dtype=int)
    index = {(int(a), int(b)): i for i, (a, b) in enumerate(mesh.edges)}
    for ci, loop in enumerate(mesh.cells):
        for i in range(len(loop)):
            a, b = int(loop[i]), int(loop[(i + 1) % len(loop)])
            key = (a, b) if a < b else (b, a)
            if key not in index:
                defects.append(f"cell {ci}: side {a}-{b} missing from "
                               "edge table")
            else:
                count[index[key]] += 1
    for ei in range(mesh.n_edges):
        if count[ei] == 0:
            defects.append(f"edge {ei}: dangling (no incident cell)")
        elif count[ei] > 2:
            defects.append(f"edge {ei}: {count[ei]} incident cells")
        elif bool(mesh.edge_boundary[ei]) != (count[ei] == 1):
            defects.append(f"edge {ei}: boundary flag inconsistent with "
                           f"incidence {count[ei]}")
        elif count[ei] == 1:
            for v in mesh.edges[ei]:
                x, y = mesh.vertices[v]
                on = (abs(x) < GEOM_TOL or abs(x - 1) < GEOM_TOL
                      or abs(y) < GEOM_TOL or abs(y - 1) < GEOM_TOL)
                if not on:
                    defects.append(f"edge {ei}: flagged boundary but vertex "
                                   f"{v} is interior")

    euler = mesh.n_vertices - mesh.n_edges + mesh.n_cells + 1
    if euler != 2:
        defects.append(f"Euler characteristic V-E+F = {euler}, expected 2")

    h = max((cell_diameter(mesh.vertices[c]) for c in mesh.cells),
            default=0.0)
    if abs(h - mesh.h_max) > GEOM_TOL:
        defects.append(f"h_max {mesh.h_max} != recomputed {h}")
    return ValidationReport(defects)


def save_mesh(mesh):
    """Serialize to the wgmesh text format (edges are derived, not stored)."""
    lines = ["wgmesh 1", f"V {mesh.n_vertices}"]
    lines += [f"{float(x)!r} {float(y)!r}" for x, y in mesh.vertices]
    lines.append(f"C {mesh.n_cells}")
    lines += [f"{len(c)} " + " ".join(str(int(v)) for v in c)
              for c in mesh.cells]
    return "\n".join(lines) + "\n"


def load_mesh(text):
    """Parse the wgmesh format; raises ParseError / ValidationError."""
    lines = text.splitlines()
    content = [(i + 1, ln.strip()) for i, ln in enumerate(lines)
               if ln.strip() and not ln.strip().startswith("#")]
    pos = 0

    def next_line(what):
        nonlocal pos
        if pos >= len(content):
            raise ParseError(f"unexpected end of file, expected {what}",
                             len(lines))
        ln = content[pos]
        pos += 1
        return ln

    lno, header = next_line("header")
    if header.split() != ["wgmesh", "1"]:
        raise ParseError(f"bad header {header!r}", lno)
    lno, vline = next_line("vertex count")
    parts = vline.split()
    if len(parts) != 2 or parts[0] != "V":
        raise ParseError(f"expected 'V <count>', got {vline!r}", lno)
    nv = int(parts[1])
    vertices = np.empty((nv, 2))
    for i in range(nv):
        lno, ln = next_line("vertex")
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'x y', got {ln!r}", lno)
        try:
            vertices[i] = [float(parts[0]), float(parts[1])]
        except ValueError:
            raise ParseError(f"bad coordinate in {ln!r}", lno) from None
    lno, cline = next_line("cell count")
    parts = cline.split()
    if len(parts) != 2 or parts[0] != "C":
        raise ParseError(f"expected 'C <count>', got {cline!r}", lno)
    nc = int(parts[1])
    cells = []
    for _ in range(nc):
        lno, ln = next_line("cell")
        try:
            nums = [int(t) for t in ln.split()]
        except ValueError:
            raise ParseError(f"bad cell line {ln!r}", lno) from None
        if not nums or len(nums) != nums[0] + 1:
            raise ParseError(f"cell line count mismatch in {ln!r}", lno)
        loop = nums[1:]
        for v in loop:
            if not 0 <= v < nv:
                raise ParseError(f"vertex index {v} out of range", lno)
        cells.append(loop)
    if pos < len(content):
        raise ParseError(f"trailing content {content[pos][1]!r}",
                         content[pos][0])
    mesh = Mesh.from_cells(vertices, cells)
    report = validate(mesh)
    if not report.ok:
        raise ValidationError("; ".join(report.defects))
    return mesh
