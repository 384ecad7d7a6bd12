"""hp finite elements on the Spectral Boundary Layer mesh for

    -eps1 u'' + eps2 b u' + c u = f  on (0, 1),  u(0) = u(1) = 0.

Submodules: ``problem`` (data, layer parameters, exact solution), ``mesh``,
``basis`` (shape functions, Gauss rules), ``assembly`` (Galerkin system and
solve), ``approximation`` (interpolant, energy-norm errors, reference
solutions) and ``harness`` (sweeps, rate fits, CSV/SVG output).
"""

from .approximation import (EnergyQuadrature, build_interpolant, energy_norm,
                            energy_norm_error, reference_solution)
from .assembly import (DiscreteSolution, assemble_global, element_matrices, evaluate_fem,
                       solve, solve_linear)
from .basis import gauss_rule, legendre_eval, shape_functions
from .harness import SweepConfig, emit_csv, emit_svg_semilog, fit_rate, run_paper, run_sweep
from .mesh import Mesh, build_sbl_mesh, build_uniform_mesh, element_map
from .problem import (Coefficient, ProblemSpec, classify_regime, compute_layer_parameters,
                      constant_coefficient_exact, get_problem, validate_assumptions)

__version__ = "0.1.0"
