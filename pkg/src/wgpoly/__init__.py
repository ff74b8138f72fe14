"""Stabilizer-free weak Galerkin solver for Poisson on polygonal meshes."""

from .analysis import (compute_errors, energy_error, energy_norm,
                       h1_norm_equivalence_probe, h1_seminorm, l2_error,
                       weak_gradient_error)
from .assembly import (GlobalSystem, assemble, enumerate_dofs,
                       export_matrix_market, interpolate)
from .basis import CellBasis, EdgeBasis, VectorCellBasis
from .harness import (ConvergenceRecord, ExactSolution, SOLUTIONS,
                      StudyConfig, compute_rates, emit_table, run_study)
from .mesh import (Mesh, build_polygon_grid, build_triangle_grid, load_mesh,
                   refine_uniform, save_mesh, validate)
from .quadrature import QuadratureRule, cell_rule, edge_rule
from .solve import SolveReport, SolveStatus, certify_spd, solve_spd
from .weakgrad import (LocalWeakGradient, apply_weak_gradient, build_local,
                       default_weak_degree, project_gradient,
                       weak_gradient_of_function)

__version__ = "0.1.0"
