"""Build the two built-in mesh families and inspect their structure.

The triangle family splits a uniform m x m grid of squares along one
diagonal.  The polygon family is its bounded centroid dual: interior cells
are congruent hexagons, boundary cells are quads/pentagons/hexagons, and
together they tile the unit square exactly.
"""

import collections

from wgpoly import build_polygon_grid, build_triangle_grid, save_mesh
from wgpoly.mesh import validate


def describe(name, mesh):
    shapes = collections.Counter(len(c) for c in mesh.cells)
    boundary = int(mesh.edge_boundary.sum())
    print(f"{name}:")
    print(f"  vertices {mesh.n_vertices}, cells {mesh.n_cells}, "
          f"edges {mesh.n_edges} ({boundary} on the boundary)")
    print(f"  cell shapes: " + ", ".join(
        f"{n}-gon x{c}" for n, c in sorted(shapes.items())))
    print(f"  h_max = {mesh.h_max:.6f}")
    report = validate(mesh)
    print(f"  validation defects: {report.defects or 'none'}")


for level in (1, 2, 3):
    describe(f"triangle level {level}", build_triangle_grid(level))
for level in (1, 2, 3):
    describe(f"polygon level {level}", build_polygon_grid(level))

# meshes serialize to a small text format and round-trip exactly
text = save_mesh(build_triangle_grid(1))
print("\nwgmesh serialization of triangle level 1:")
print(text)
