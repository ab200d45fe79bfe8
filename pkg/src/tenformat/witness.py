"""Constructive separation tensors between tree formats.

These builders produce explicit members of one tensor-format variety whose
flattening rank along a chosen factor set exceeds what a smaller rank bound
in another format could allow.  Every random choice is drawn as integers
and certified by exact rank computations, with resampling on degenerate
draws, so a returned witness is a checked certificate rather than a
probability-one claim.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._linalg import exact_rank
from .errors import ConstructionFailureError, InvalidArgumentError
from .tensor import DenseTensor, RATIONAL, flattening_rank, outer
from .trees import (BinaryTree, LeafOrdering, descendant_cover_number,
                    perfect_tree, train_track_tree)
from .tns import (MAX_RESAMPLES, _expand_ambient, _random_local_bases,
                  effective_ranks, is_member, normalize_rank_function,
                  sample_member)


def product_witness(t1: DenseTensor, t2: DenseTensor, tree: BinaryTree,
                    root1: int, root2: int,
                    ordering: LeafOrdering | None = None,
                    fillers: dict | None = None,
                    dims: Sequence[int] | None = None,
                    seed: int = 0) -> DenseTensor:
    """Product tensor supported on two disjoint subtrees plus filler vectors.

    ``t1`` and ``t2`` live on the factor blocks below ``root1`` and
    ``root2`` (axes in ascending factor order); every remaining factor gets
    a nonzero filler vector.  The result stays inside the tree's variety at
    the factors' own ranks, and its flattening rank along any set splits
    into the product of the two blockwise ranks.

    Fillers may be given per factor index; otherwise random nonzero integer
    vectors are drawn from ``seed`` using ``dims`` for the missing factors.
    """
    ordering = ordering or LeafOrdering.identity(tree.n_leaves)
    cos1 = tree.descendant_leaves(root1)
    cos2 = tree.descendant_leaves(root2)
    if cos1 & cos2:
        raise InvalidArgumentError("the two subtrees overlap")
    factors1 = tuple(sorted(ordering.map_slots(cos1)))
    factors2 = tuple(sorted(ordering.map_slots(cos2)))
    if t1.n_factors != len(factors1) or t2.n_factors != len(factors2):
        raise InvalidArgumentError("tensor order does not match its subtree block")
    if t1.arith != t2.arith:
        raise InvalidArgumentError("mixed scalar kinds")
    rest = sorted(set(range(1, tree.n_leaves + 1)) - set(factors1) - set(factors2))
    rng = random.Random(seed)
    tensors = [t1, t2]
    assignment: list[tuple[int, ...]] = [factors1, factors2]
    for f in rest:
        if fillers is not None and f in fillers:
            vec = np.asarray(fillers[f], dtype=object)
            if not any(bool(x) for x in vec.reshape(-1)):
                raise InvalidArgumentError(f"filler for factor {f} is zero")
            filler = DenseTensor(vec, t1.arith)
        else:
            if dims is None:
                raise InvalidArgumentError(
                    f"no filler for factor {f} and no dims to draw one from")
            filler = _random_nonzero_vector(dims[f - 1], rng, t1.arith)
        tensors.append(filler)
        assignment.append((f,))
    return outer(tensors, assignment)


def hackbusch_witness(k: int, r: int, sigma, dims: Sequence[int] | None = None,
                      seed: int = 0, max_attempts: int = 3) -> tuple[DenseTensor, int]:
    """Member of the depth-``k`` perfect-tree variety at rank ``r`` with a
    prefix flattening rank at least ``r**ceil(k/2)``.

    ``sigma`` orders the train track tree's slots over the perfect tree's
    factors; the returned ``j`` is the prefix length whose factor set
    ``{sigma(1..j)}`` carries the certified rank.  Membership and the rank
    bound are verified exactly before returning.
    """
    if k < 1:
        raise InvalidArgumentError("k must be at least 1")
    if r < 2:
        raise InvalidArgumentError("r must be at least 2")
    n = 2**k
    sigma = _as_ordering(sigma, n)
    dims = _witness_dims(dims, n, r)
    target = r ** ((k + 1) // 2)
    tree = perfect_tree(k)
    rng = random.Random(seed)
    trace: tuple = ()
    for _ in range(max_attempts):
        try:
            t, j, trace = _construct(k, r, sigma.image, dims, rng)
        except ConstructionFailureError as exc:
            trace = exc.trace
            continue
        prefix = frozenset(sigma.image[:j])
        rank = flattening_rank(t, prefix)
        if rank >= target and is_member(t, tree, r).member:
            return t, j
    raise ConstructionFailureError(
        f"witness construction failed its exact certification (k={k}, r={r})",
        trace=trace)


def cherry_witness(k: int, r: int, matching, dims: Sequence[int] | None = None,
                   seed: int = 0) -> tuple[DenseTensor, tuple[int, int]]:
    """Member of the train track variety at rank ``r`` whose flattening on a
    sibling leaf pair of the perfect tree has rank exactly ``r**2``.

    The cherry is chosen so that neither of its factors sits at an extreme
    train-track slot, which exists whenever ``k >= 3``.  Membership and the
    cherry rank are verified exactly.
    """
    if k < 3:
        raise InvalidArgumentError("the cherry construction needs k >= 3")
    if r < 1:
        raise InvalidArgumentError("r must be at least 1")
    n = 2**k
    matching = _as_ordering(matching, n)
    dims = _witness_dims(dims, n, r)
    a = matching.factor_of(1)
    b = matching.factor_of(n)
    cherry = next((2 * i - 1, 2 * i) for i in range(1, n // 2 + 1)
                  if a not in (2 * i - 1, 2 * i) and b not in (2 * i - 1, 2 * i))
    c1, c2 = cherry
    first, second = ((c1, c2) if matching.slot_of(c1) < matching.slot_of(c2)
                     else (c2, c1))
    tt = train_track_tree(n)
    rng = random.Random(seed)
    rest = sorted(set(range(1, n + 1)) - {a, b, c1, c2})
    for _ in range(MAX_RESAMPLES + 1):
        y1 = _coupled_pair(dims[a - 1], dims[first - 1], r, rng)
        y2 = _coupled_pair(dims[second - 1], dims[b - 1], r, rng)
        tensors = [DenseTensor(y1, RATIONAL), DenseTensor(y2, RATIONAL)]
        assignment: list[tuple[int, ...]] = [(a, first), (second, b)]
        for f in rest:
            tensors.append(_random_nonzero_vector(dims[f - 1], rng, RATIONAL))
            assignment.append((f,))
        t = outer(tensors, assignment)
        if flattening_rank(t, frozenset(cherry)) != r * r:
            continue
        if is_member(t, tt, r, matching).member:
            return t, cherry
    raise ConstructionFailureError(
        f"cherry construction failed its exact certification (k={k}, r={r})",
        trace=("cherry", cherry))


def naive_rank_gap_example(seed: int = 0) -> tuple[DenseTensor, int, int]:
    """Generic rank-2 depth-3 member whose {1,2,3,5} flattening rank falls
    short of the cover-number prediction.

    Returns the sampled tensor, its measured rank on factors {1,2,3,5}, and
    the naive prediction ``2**min(h(A), h(complement))`` computed from exact
    descendant covers.
    """
    tree = perfect_tree(3)
    dims = (2,) * 8
    t, _ = sample_member(tree, 2, dims, seed)
    subset = frozenset({1, 2, 3, 5})
    rest = frozenset(range(1, 9)) - subset
    measured = flattening_rank(t, subset)
    h = min(descendant_cover_number(tree, subset),
            descendant_cover_number(tree, rest))
    return t, measured, 2**h


def separating_index(k: int) -> int:
    """Prefix length whose initial segment separates the formats for odd ``k``.

    The value is the integer with alternating binary digits ``1010...10``
    on ``k - 1`` digits, plus one.
    """
    if k < 1 or k % 2 == 0:
        raise InvalidArgumentError("the separating index is defined for odd k only")
    bits = "10" * ((k - 1) // 2)
    return (int(bits, 2) if bits else 0) + 1


# -- recursive construction -------------------------------------------------------


def _construct(k: int, r: int, sigma: tuple[int, ...], dims: tuple[int, ...],
               rng: random.Random) -> tuple[DenseTensor, int, tuple]:
    """Witness for one recursion level; assumes nothing about sigma[0]."""
    if sigma[0] != 1:
        return _relabel_and_construct(k, r, sigma, dims, rng)
    if k == 0:
        vec = _random_nonzero_vector(dims[0], rng, RATIONAL)
        return vec, 1, ("single-leaf",)
    if k == 1:
        t, _ = sample_member(perfect_tree(1), r, dims, seed=rng.getrandbits(32))
        return t, 1, ("pair-base",)

    n = len(sigma)
    m = n // 4
    bound = r ** ((k + 1) // 2)
    blocks = {a: frozenset(range((a - 1) * m + 1, a * m + 1)) for a in (1, 2, 3, 4)}
    sub = {}
    for a in (1, 2, 3, 4):
        offset = (a - 1) * m
        sub_sigma = tuple(f - offset for f in sigma if f in blocks[a])
        sub_dims = dims[offset:offset + m]
        sub[a] = (_construct(k - 2, r, sub_sigma, sub_dims, rng), offset)
    positions = {a: [i + 1 for i, f in enumerate(sigma) if f in blocks[a]]
                 for a in (1, 2, 3, 4)}
    hit = {a: positions[a][sub[a][0][1] - 1] for a in (1, 2, 3, 4)}

    j1, a_star = min((hit[a], a) for a in (1, 2, 3, 4))
    prefix1 = frozenset(sigma[:j1])
    outside = prefix1 - blocks[a_star]
    if outside:
        b = (min(outside) - 1) // m + 1
        t = _lemma_product(k, r, dims, rng, prefix1, bound,
                           sub[a_star][0][0], a_star, ("quarter", b))
        return t, j1, ("disjoint-hit", a_star, b)

    # prefix1 sits inside the hit quarter, which must be the one holding factor 1
    j2, b_star = min((hit[a], a) for a in (2, 3, 4))
    prefix2 = frozenset(sigma[:j2])
    extra = prefix2 - blocks[1] - blocks[b_star]
    if extra:
        c = (min(extra) - 1) // m + 1
        t = _lemma_product(k, r, dims, rng, prefix2, bound,
                           sub[b_star][0][0], b_star, ("quarter", c))
        return t, j2, ("third-quarter", b_star, c)
    if not blocks[1] <= prefix2:
        t = _lemma_product(k, r, dims, rng, prefix2, bound,
                           sub[b_star][0][0], b_star, ("quarter", 1))
        return t, j2, ("first-quarter-partial", b_star)
    if b_star != 2:
        t = _lemma_product(k, r, dims, rng, prefix2, bound,
                           sub[b_star][0][0], b_star, ("half", 1))
        return t, j2, ("far-pair", b_star)
    t = _adjacent_pair(k, r, dims, rng, prefix2, bound, sub[2][0][0])
    return t, j2, ("adjacent-pair",)


def _relabel_and_construct(k, r, sigma, dims, rng):
    # Relabel factors by the level-swap involution sending sigma[0] to 1;
    # it respects the perfect tree, so membership transports back.
    n = len(sigma)
    mask = sigma[0] - 1
    perm = tuple(((i - 1) ^ mask) + 1 for i in range(1, n + 1))
    sigma2 = tuple(perm[f - 1] for f in sigma)
    dims2 = tuple(dims[p - 1] for p in perm)
    t2, j, trace = _construct(k, r, sigma2, dims2, rng)
    data = np.transpose(t2.data, [p - 1 for p in perm])
    return DenseTensor(data, t2.arith), j, trace + ("relabel",)


#: Vertex ids of the quarter subtree roots in heap numbering (depth 2).
_QUARTER_VERTEX = {1: 3, 2: 4, 3: 5, 4: 6}
#: Vertex ids of the half subtree roots (depth 1).
_HALF_VERTEX = {1: 1, 2: 2}


def _lemma_product(k, r, dims, rng, prefix, bound, w_tensor, w_quarter, gen_spec):
    """Assemble witness x generic-member product and certify its prefix rank.

    ``gen_spec`` picks the generic side: ("quarter", a) or ("half", 1).
    """
    n = len(dims)
    m = n // 4
    tree = perfect_tree(k)
    kind, index = gen_spec
    if kind == "quarter":
        gen_vertex = _QUARTER_VERTEX[index]
        gen_depth = k - 2
        offset = (index - 1) * m
        width = m
    else:
        gen_vertex = _HALF_VERTEX[index]
        gen_depth = k - 1
        offset = 0
        width = 2 * m
    w_vertex = _QUARTER_VERTEX[w_quarter]
    gen_dims = dims[offset:offset + width]
    local_prefix = frozenset(f - offset for f in prefix
                             if offset < f <= offset + width)
    for _ in range(MAX_RESAMPLES + 1):
        t_gen, _ = sample_member(perfect_tree(gen_depth), r, gen_dims,
                                 seed=rng.getrandbits(32))
        if flattening_rank(t_gen, local_prefix) < r:
            continue
        t = product_witness(t_gen, w_tensor, tree, gen_vertex, w_vertex,
                            dims=dims, seed=rng.getrandbits(32))
        if flattening_rank(t, prefix) >= bound:
            return t
    raise ConstructionFailureError(
        "product assembly missed the certified rank", trace=(gen_spec,))


def _adjacent_pair(k, r, dims, rng, prefix, bound, w_tensor):
    """Witness for a full first quarter plus a prefix of its sibling quarter.

    A generic vector couples an r-dimensional nested subspace on the first
    quarter with one on the far half; tensored with the sibling quarter's
    recursive witness, contracting the first quarter hands the far-half
    subspace through, multiplying the ranks.
    """
    n = len(dims)
    m = n // 4
    q1 = tuple(range(1, m + 1))
    q2 = tuple(range(m + 1, 2 * m + 1))
    far = tuple(range(2 * m + 1, n + 1))
    for _ in range(MAX_RESAMPLES + 1):
        b1 = _chain_root_basis(perfect_tree(k - 2), r, dims[:m], rng)
        b2 = _chain_root_basis(perfect_tree(k - 1), r, dims[2 * m:], rng)
        if b1 is None or b2 is None:
            continue
        coeff = [Fraction(rng.randint(-10, 10)) for _ in range(r * r)]
        if exact_rank([coeff[i * r:(i + 1) * r] for i in range(r)]) != r:
            continue
        pair = (b1[:, None, :, None] * b2[None, :, None, :]).reshape(r * r, -1)
        u_flat = np.dot(np.array(coeff, dtype=object).reshape(1, r * r), pair)
        u_shape = tuple(dims[f - 1] for f in q1 + far)
        u = DenseTensor(u_flat.reshape(u_shape), RATIONAL)
        t = outer([u, w_tensor], [q1 + far, q2])
        if flattening_rank(t, prefix) >= bound:
            return t
    raise ConstructionFailureError(
        "adjacent-pair assembly missed the certified rank", trace=("adjacent-pair",))


def _chain_root_basis(tree: BinaryTree, r: int, dims: Sequence[int],
                      rng: random.Random) -> np.ndarray | None:
    """Ambient basis of a generic r-dimensional nested subspace at the root."""
    fr = normalize_rank_function(tree, r, dims)
    fp = effective_ranks(tree, fr, root_dim=r)
    local = _random_local_bases(tree, fp, dims, rng, RATIONAL)
    ambient = _expand_ambient(tree, local, dims, LeafOrdering.identity(tree.n_leaves))
    basis = ambient[tree.root]
    if exact_rank(basis.tolist()) != r:
        return None
    return basis


def _coupled_pair(d1: int, d2: int, r: int, rng: random.Random) -> np.ndarray:
    """Generic element of U1 (x) U2 for random r-dimensional coordinate subspaces."""
    u1 = _random_int_matrix(r, d1, rng)
    u2 = _random_int_matrix(r, d2, rng)
    c = _random_int_matrix(r, r, rng)
    return np.dot(np.dot(u1.T, c), u2)


def _random_int_matrix(rows: int, cols: int, rng: random.Random) -> np.ndarray:
    arr = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            arr[i, j] = Fraction(rng.randint(-10, 10))
    return arr


def _random_nonzero_vector(dim: int, rng: random.Random, arith: str) -> DenseTensor:
    while True:
        vals = [rng.randint(-10, 10) for _ in range(dim)]
        if any(vals):
            break
    if arith == RATIONAL:
        return DenseTensor(np.array([Fraction(x) for x in vals], dtype=object), arith)
    return DenseTensor(np.array(vals, dtype=float), arith)


def _as_ordering(value, n: int) -> LeafOrdering:
    ordering = value if isinstance(value, LeafOrdering) else LeafOrdering(tuple(value))
    if ordering.n != n:
        raise InvalidArgumentError(f"ordering must have length {n}")
    return ordering


def _witness_dims(dims: Sequence[int] | None, n: int, r: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims) if dims is not None else (r,) * n
    if len(dims) != n:
        raise InvalidArgumentError(f"need {n} leaf dimensions")
    if any(d < r for d in dims):
        raise InvalidArgumentError("every leaf dimension must be at least r")
    return dims
