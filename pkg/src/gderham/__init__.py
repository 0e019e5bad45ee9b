"""Exact de Rham cohomology and graded duality for Weyl-algebra modules.

The package models graded modules over Q[x1..xn]<d1..dn> by finite-window
degreewise presentations, computes their length-n Koszul (de Rham)
cohomology with exact rational arithmetic, applies the graded dual
functor, and verifies the expected duality statements on a zoo of
standard modules.
"""

from .errors import (ComplexConditionViolated, CoarseModeUnsupported,
                     GderhamError, IncompatibleSpecs, IncompleteWindow,
                     InhomogeneousOperator, NotAMapOfPresentations,
                     PreconditionFailed, RecipeError, ShapeMismatch,
                     UncoveredRegion, VariableCountMismatch)
from .grading import GradingSpec, Label, Mode, Window
from .linalg import (ExactMatrix, cohomology_dim, kernel_basis, rank,
                     subquotient_dim)
from .weyl import INHOMOGENEOUS, WeylOp, euler, multiply, op_degree, parse_op
from .weyl import transpose as weyl_transpose
from .gmodule import (GradedMap, GradedPresentation, apply_op, direct_sum,
                      euler_offsets, is_eulerian, shift, validate)
from .constructors import (cyclic_xd, injective_hull_E, local_coh_vars,
                           parse_recipe, polynomial_ring, ses_xd)
from .derham import (CohomologyTable, build_summand, derham_cohomology,
                     h0_fast, hn_fast, koszul_homology)
from .dual import (dual_map, eulerian_dual_check, evaluation_check,
                   matlis_dual, residue)
from .verify import (TheoremReport, check_injections, check_surjections,
                     graded_hom_to_e_dim, max_injections_from_R,
                     max_surjections_onto_E, run_harness, surjection_onto_E,
                     verify_duality, verify_eulerian_duality,
                     verify_noninjectivity, zoo_members)

__version__ = "0.1.0"
