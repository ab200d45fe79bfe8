"""Cross-tree containment exponents via exact DOAD covers.

If every vertex block of the target tree (or its complement) is an exact
union of at most ``c`` DOAD sets of the source tree, then every member of
the source variety at rank ``r`` satisfies the target bounds at rank
``r**c``.  The exponent returned here is the tightest one that argument
certifies: per target vertex the smaller of the two cover numbers, then
the maximum over vertices.
"""

from __future__ import annotations

from .errors import InternalInconsistencyError, InvalidArgumentError
from .trees import (BinaryTree, LeafOrdering, doad_cover_number, perfect_tree,
                    train_track_tree)


def transfer_exponent(tree_a: BinaryTree, tree_b: BinaryTree,
                      ordering_a: LeafOrdering | None = None,
                      ordering_b: LeafOrdering | None = None,
                      per_vertex: dict | None = None) -> int:
    """Smallest certified exponent ``c`` for source ``tree_a`` into target ``tree_b``.

    Both orderings map leaf slots onto the same factor indices ``1..n``.
    Pass a dict as ``per_vertex`` to collect the per-target-vertex cover
    numbers.
    """
    n = tree_a.n_leaves
    if tree_b.n_leaves != n:
        raise InvalidArgumentError("trees must have the same number of leaves")
    ordering_a = ordering_a or LeafOrdering.identity(n)
    ordering_b = ordering_b or LeafOrdering.identity(n)
    if ordering_a.n != n or ordering_b.n != n:
        raise InvalidArgumentError("orderings must match the leaf count")
    full = frozenset(range(1, n + 1))
    best = 1
    for v in tree_b.vertices:
        block = ordering_b.map_slots(tree_b.descendant_leaves(v))
        options = []
        for side in (block, full - block):
            if not side:
                options.append(1)
                continue
            cover = doad_cover_number(tree_a, ordering_a, side)
            if cover is not None:
                options.append(cover)
        if not options:
            raise InvalidArgumentError("no DOAD cover exists for a vertex block")
        c_v = min(options)
        if per_vertex is not None:
            per_vertex[v] = c_v
        best = max(best, c_v)
    return best


def hf_to_tt_bound(k: int) -> int:
    """Exponent carrying the depth-``k`` perfect-tree format into the train track format.

    Equals ``ceil(k/2)`` and is cross-checked against the exact cover search
    at desk scale.
    """
    if k < 1:
        raise InvalidArgumentError("k must be at least 1")
    value = (k + 1) // 2
    _assert_consistent(k, value, hf_to_tt=True)
    return value


def tt_to_hf_bound(k: int) -> int:
    """Exponent carrying the train track format into the depth-``k`` perfect-tree format.

    Equals 2 for k >= 3 and 1 for k <= 2 (for k <= 2 every perfect-tree
    vertex block is itself DOAD for the train track tree), cross-checked
    against the exact cover search at desk scale.
    """
    if k < 1:
        raise InvalidArgumentError("k must be at least 1")
    value = 2 if k >= 3 else 1
    _assert_consistent(k, value, hf_to_tt=False)
    return value


#: Consistency assertions recompute the exact exponent up to this depth.
_CONSISTENCY_MAX_K = 5


def _assert_consistent(k: int, value: int, hf_to_tt: bool) -> None:
    if k > _CONSISTENCY_MAX_K:
        return
    hf = perfect_tree(k)
    tt = train_track_tree(2**k)
    exact = transfer_exponent(hf, tt) if hf_to_tt else transfer_exponent(tt, hf)
    if exact != value:
        raise InternalInconsistencyError(
            f"closed-form exponent {value} disagrees with the exact cover "
            f"search ({exact}) at k={k}")
