"""Numerical solver for the critical point problem of action functionals
attached to Clifford symplectic pencils on flat tori.

The pipeline: construct and verify a Clifford pencil, diagonalize the
first-order operator mode by mode, split off the high modes by a
contraction fixed point, search the reduced generating function for
critical points, and compare the count against the torus lower bounds
(sum of Betti numbers, cup-length plus one).
"""

from .clifford import (CliffordModule, InnerProduct, Pencil, PencilError,
                       SkewForm, build_clifford_module, cliffordize,
                       is_compatible, module_from_json, module_to_json,
                       pencil_from_module, pencil_pairing,
                       radon_hurwitz_max_rank, symbol_invertible, verify_module)
from .config import ExperimentConfig, config_from_toml, config_to_toml, presets
from .fields import (Frame, FourierField, apply_dirac, field_from_json,
                     field_to_json, l2_inner, l2_norm, lie_derivative,
                     mode_operator, mode_spectrum, regularity_gap,
                     su2_counterexample_residual)
from .hamiltonians import (LatticeTorus, TrigHamiltonian, action,
                           hess_apply_field, nabla_H_field)
from .pipeline import ResultBundle, build_problem, run, write_bundle
from .reduction import (ContractionError, FiberSolution, ReducedProblem,
                        Truncation, choose_truncation, fiber_scaling_rows,
                        lemma_quadratic_diagnostic, make_truncation)
from .search import (CriticalRecord, SearchResult, arnold_bounds, classify,
                     find_critical_points, records_to_json_docs, verify_theorem)

__version__ = "0.1.0"
