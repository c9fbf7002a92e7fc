"""Exact decision procedures for products and commutators of nonnegative
square-zero matrices, with certified nonnegative-rank bounds."""

from .exactmat import Matrix, det, det_rank_one_update, matmul, rank
from .lattice import (
    BlockForm,
    IndexPartition,
    IndexSet,
    assemble_from_form,
    disjoint_complement,
    null_ideal,
    product_form_decomposition,
    triple_decomposition,
)
from .nnrank import (
    NNRankBounds,
    SupportPattern,
    nonneg_rank_bounds,
    rank2_exact_factorization,
    rectangle_cover_number,
    support_pattern,
)
from .squarezero import (
    CommutatorReport,
    SquareZeroWitness,
    Verdict,
    commutator_analysis,
    construct_factors_from_form,
    cube_zero_root,
    decide_square_zero_product,
    form_from_cube_zero,
    necessary_condition_check,
    verify_witness,
)
from .counterexample import (
    Lemma23Report,
    build_T13,
    build_counterexample_T,
    lemma23_check,
    randomized_commutator_search,
)
from .gen import GenConfig, gen_commutator_pair, gen_tiny_exhaustive, gen_witness

__version__ = "0.1.0"

__all__ = [
    "Matrix",
    "matmul",
    "rank",
    "det",
    "det_rank_one_update",
    "IndexSet",
    "IndexPartition",
    "BlockForm",
    "null_ideal",
    "disjoint_complement",
    "triple_decomposition",
    "product_form_decomposition",
    "assemble_from_form",
    "SupportPattern",
    "support_pattern",
    "rectangle_cover_number",
    "rank2_exact_factorization",
    "nonneg_rank_bounds",
    "NNRankBounds",
    "SquareZeroWitness",
    "Verdict",
    "CommutatorReport",
    "verify_witness",
    "construct_factors_from_form",
    "cube_zero_root",
    "form_from_cube_zero",
    "decide_square_zero_product",
    "commutator_analysis",
    "necessary_condition_check",
    "build_T13",
    "build_counterexample_T",
    "lemma23_check",
    "Lemma23Report",
    "randomized_commutator_search",
    "GenConfig",
    "gen_witness",
    "gen_commutator_pair",
    "gen_tiny_exhaustive",
]
