"""Exact Lefschetz-property computations for monomial artinian algebras."""

from .algebra import (HilbertFunction, LinearForm, MonomialAlgebra, extension_matrix_blocks,
                      generic_rank, hilbert_function, mult_matrix, parse_descriptor, tensor_ci,
                      tensor_extend)
from .binom_dets import BinomSpec, build_c, det_c_exact, plane_partitions, prime_cond_product
from .exact_linalg import ExactMatrix, RankReport, det, rank_mod_p, rank_rational
from .lefschetz import (ci_det_recursion, equivalence_audit, has_slp, has_wlp,
                        quadratic_a_recursion)
from .recursion import RankQuery, build_lr, decide_full_rank, det_formula

__version__ = "0.1.0"

__all__ = [
    "BinomSpec", "ExactMatrix", "HilbertFunction", "LinearForm", "MonomialAlgebra", "RankQuery",
    "RankReport", "build_c", "build_lr", "ci_det_recursion", "decide_full_rank", "det",
    "det_c_exact", "det_formula", "equivalence_audit", "extension_matrix_blocks",
    "generic_rank", "has_slp", "has_wlp", "hilbert_function", "mult_matrix",
    "parse_descriptor", "plane_partitions", "prime_cond_product", "quadratic_a_recursion",
    "rank_mod_p", "rank_rational", "tensor_ci", "tensor_extend",
]
