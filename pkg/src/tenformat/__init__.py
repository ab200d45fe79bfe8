"""Tensor-network-state varieties over binary trees.

Library + CLI for the two extremal binary-tree tensor formats (the
perfect-tree hierarchical format and the train-track format): exact
membership tests via flattening ranks, variety dimensions, cross-format
containment exponents, and constructive witness tensors separating the
formats.
"""

from .errors import (ConstructionFailureError, InternalInconsistencyError,
                     InvalidArgumentError, SamplingFailureError, TenformatError)
from .harness import (check_containment, jacobian_dimension_oracle,
                      verify_cherry_sweep, verify_hackbusch_sweep)
from .tensor import (DEFAULT_TOLERANCE, DenseTensor, FLOAT, FlatMatrix, RATIONAL,
                     complement, flatten, flattening_rank, matrix_rank, outer)
from .tns import (EffectiveRanks, MembershipResult, RankFunction, SubspaceChain,
                  constant_dimension_shortcut, dimension_summary, effective_ranks,
                  extract_subspaces, is_member, normalize_rank_function,
                  rank_profile, sample_member, variety_dimension)
from .transfer import hf_to_tt_bound, transfer_exponent, tt_to_hf_bound
from .trees import (BinaryTree, LeafOrdering, LeafSet, all_tree_shapes,
                    descendant_cover_number, doad_cover_number, explicit_tree,
                    ones_count, perfect_tree, train_track_tree)
from .witness import (cherry_witness, hackbusch_witness, naive_rank_gap_example,
                      product_witness, separating_index)

__version__ = "0.1.0"

__all__ = [
    "BinaryTree", "ConstructionFailureError", "DEFAULT_TOLERANCE", "DenseTensor",
    "EffectiveRanks", "FLOAT", "FlatMatrix", "InternalInconsistencyError",
    "InvalidArgumentError", "LeafOrdering", "LeafSet", "MembershipResult",
    "RATIONAL", "RankFunction", "SamplingFailureError", "SubspaceChain",
    "TenformatError", "all_tree_shapes", "check_containment", "cherry_witness",
    "complement", "constant_dimension_shortcut", "descendant_cover_number",
    "dimension_summary", "doad_cover_number", "effective_ranks", "explicit_tree",
    "extract_subspaces", "flatten", "flattening_rank", "hackbusch_witness",
    "hf_to_tt_bound", "is_member", "jacobian_dimension_oracle", "matrix_rank",
    "naive_rank_gap_example", "normalize_rank_function", "ones_count", "outer",
    "perfect_tree", "product_witness", "rank_profile", "sample_member",
    "separating_index", "train_track_tree", "transfer_exponent",
    "tt_to_hf_bound", "variety_dimension", "verify_cherry_sweep",
    "verify_hackbusch_sweep",
]
