"""The discrete weak gradient, computed cell by cell.

A weak function on a cell T is a pair {v0, vb}: a polynomial of degree k
inside T and an independent polynomial of degree k on each edge.  Its weak
gradient is the vector polynomial G in [P_j(T)]^2 defined by integration by
parts against every test field q:

    (G, q)_T = -(v0, div q)_T + <vb, q.n>_dT

This script shows the two facts the method rests on:
  * the weak gradient of a continuous polynomial equals the L2 projection
    of its true gradient (so the discretization is consistent), and
  * j must exceed k, otherwise the local stiffness matrix has spurious
    kernel vectors and the global system is singular.
"""

import numpy as np

from wgpoly import build_triangle_grid
from wgpoly.weakgrad import (build_local, default_weak_degree,
                             project_gradient, weak_gradient_of_function)

mesh = build_triangle_grid(2)
k = 1
j = default_weak_degree(3, k)
print(f"k = {k}, default weak-gradient degree on triangles: j = {j}")

# consistency: grad_w of x*y against the projected exact gradient
ci = 3
a = weak_gradient_of_function(mesh, ci, lambda p: p[:, 0] * p[:, 1], j)
b = project_gradient(mesh, ci, lambda p: np.column_stack([p[:, 1],
                                                          p[:, 0]]), k, j)
print(f"consistency check on cell {ci}: max coefficient gap "
      f"{np.abs(a - b).max():.2e}")

# kernel dimensions: constants only for j > k, extra modes for j = k
for jj in (k, k + 1, k + 2):
    op = build_local(mesh, 0, k, jj)
    w = np.linalg.eigvalsh(op.A)
    dim = int((w < 1e-12 * np.trace(op.A)).sum())
    tag = "constants only" if dim == 1 else "SPURIOUS modes -> singular"
    print(f"  j = {jj}: local stiffness kernel dimension {dim} ({tag})")
