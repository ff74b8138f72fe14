"""Assemble and solve one Poisson problem, end to end.

   -Laplace(u) = 2 pi^2 sin(pi x) sin(pi y)  on the unit square,
             u = 0                           on the boundary,

with exact solution u = sin(pi x) sin(pi y).  The bilinear form is just
(grad_w u_h, grad_w v) -- no stabilizer or penalty term.
"""

import numpy as np

from wgpoly import build_triangle_grid
from wgpoly.analysis import compute_errors
from wgpoly.assembly import assemble
from wgpoly.harness import SOLUTIONS
from wgpoly.solve import solve_spd

exact = SOLUTIONS["sin"]
mesh = build_triangle_grid(5)
k = 2

system = assemble(mesh, k, "auto", exact.f)
print(f"mesh: {mesh.n_cells} cells, h = {mesh.h_max:.4f}")
print(f"system: {system.A.shape[0]} free unknowns, nnz = {system.A.nnz}")

report = solve_spd(system.A, system.b,
                   blocks=system.dofmap.free_blocks())
print(f"solver: {report.status.name}, {report.iterations} iterations, "
      f"relative residual {report.residual:.2e}")

u_h = system.embed(report.x)
err = compute_errors(u_h, exact, mesh, k, "auto")
print(f"||Q_0 u - u_0||      = {err.l2_error:.3E}")
print(f"|||Q_h u - u_h|||    = {err.energy_error:.3E}")

# sanity: the discrete solution's cell averages track the exact solution
mid = np.array([[0.5, 0.5]])
print(f"u(0.5, 0.5) exact    = {float(exact.u(mid)):.6f}")
