"""Convergence studies on both mesh families.

On triangles with elements of degree k (weak gradient degree k+1), the
L2 error decays like h^(k+1) and the energy-norm error like h^k.  The same
orders hold on the polygon family with the degree rule j = n + k - 1 for
n-gons.  Levels are kept modest so the script runs in seconds; the
reference tables in the test suite push to level 8.
"""

from wgpoly.harness import StudyConfig, emit_table, run_study

for family, k, levels in [("triangle", 1, (3, 5)),
                          ("triangle", 2, (3, 5)),
                          ("polygon", 1, (3, 5)),
                          ("polygon", 2, (3, 5))]:
    cfg = StudyConfig(family=family, k=k, j="auto", levels=levels)
    records = run_study(cfg)
    print(f"--- {family} family, k = {k} ---")
    print(emit_table(records, "markdown"))
