"""Why the weak-gradient degree must be raised: a j-sweep.

For elements of degree k on triangles, weak-gradient degree j = k produces
a singular stiffness matrix -- the reason classical weak Galerkin methods
need a stabilizer.  Raising j to k+1 restores positive definiteness without
any penalty term.  This sweep reproduces that boundary for k = 1..4.
"""

from wgpoly import build_triangle_grid
from wgpoly.assembly import assemble
from wgpoly.harness import SOLUTIONS
from wgpoly.solve import certify_spd, solve_spd

mesh = build_triangle_grid(3)
f = SOLUTIONS["sin"].f

print(f"triangle level 3 ({mesh.n_cells} cells)")
print("k  j  certify_spd  solve status")
for k in range(1, 5):
    for j in (k, k + 1):
        system = assemble(mesh, k, j, f)
        spd = certify_spd(system.A)
        report = solve_spd(system.A, system.b,
                           blocks=system.dofmap.free_blocks())
        print(f"{k}  {j}  {str(spd):5}        {report.status.name}")
