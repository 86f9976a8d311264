"""Exact arithmetic for finitely generated extended Choquet cones."""

from .errors import (ExtConeError, LatticeError, PreconditionError, SchemaError,
                     SolverFailure, StepBudgetExceeded, VerificationError)
from .xreal import (INF, ONE, ZERO, ExtScalar, ExtVector, ext, format_scalar,
                    parse_scalar, vec_approx_member, vec_is_idempotent,
                    vec_support_idem, vec_way_below, xr_arith)
from .fg_cone import (ConeElement, ConePresentation, Lattice, ValidationReport,
                      canonicalize, cone_add, cone_leq, element_join,
                      element_meet, generator_element, idem_element, idem_ops,
                      sample_elements, scalar_mul, validate_presentation,
                      zero_element)
from .afun import (LscFn, afun_add, afun_compare, afun_eval, afun_leq, afun_lhd,
                   afun_meet, afun_subtract, afun_way_below, approx_stage,
                   face_indicator, fn_scale, infty_scale, lincomb, make_fn,
                   riesz_decompose, riesz_split, zero_fn)
from .riesz_space import (RieszVector, SupportSets, afun_to_riesz,
                          indicator_vector, interpolate, is_positive,
                          make_vector, pairing, positivity_support, reconstruct,
                          riesz_leq, separating_family, support_sets,
                          vector_element, zero_vector)
from .ehs_engine import (Degree, Factorization, TriangleResult, core_triangle,
                         build_inductive_system, degree, seed_functions,
                         triangle)
from .limits import (BratteliDiagram, CuMatrix, InductiveSystem,
                     ProjectiveSystem, bratteli_import, dualize, ext_dot,
                     functional_iso, idempotent_count, identity_matrix,
                     make_matrix, make_system, mat_apply, matmul,
                     roundtrip_check, thread_eval, transpose)

__version__ = "0.1.0"
