"""Tensor-network-state varieties over binary trees.

A tensor belongs to the variety attached to a tree and a per-vertex rank
bound when every vertex flattening (leaf slots below the vertex versus
the rest) has rank at most the bound.  This module provides the rank
bookkeeping (normalization and effective ranks), the dimension formula,
membership tests with full rank profiles, generic member sampling with
exact certification, and nested-subspace extraction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import _linalg
from .errors import (InternalInconsistencyError, InvalidArgumentError,
                     SamplingFailureError)
from .tensor import (DenseTensor, FLOAT, RATIONAL, flatten, flattening_rank,
                     resolve_tolerance)
from .trees import BinaryTree, LeafOrdering

#: Effective (root-down reduced) rank bounds, keyed by vertex id.
EffectiveRanks = dict[int, int]

#: Sampling draws integers from this symmetric range.
SAMPLE_LOW, SAMPLE_HIGH = -10, 10

#: How many times degenerate random draws are retried before giving up.
MAX_RESAMPLES = 20


@dataclass(frozen=True)
class RankFunction:
    """Per-vertex rank bounds, indexed by vertex id."""

    values: tuple[int, ...]
    zero_variety: bool = False

    @classmethod
    def constant(cls, tree: BinaryTree, r: int) -> "RankFunction":
        return cls((int(r),) * tree.n_vertices)

    @classmethod
    def from_map(cls, tree: BinaryTree, mapping: Mapping[int, int]) -> "RankFunction":
        missing = [v for v in tree.vertices if v not in mapping]
        if missing:
            raise InvalidArgumentError(f"rank function misses vertices {missing}")
        return cls(tuple(int(mapping[v]) for v in tree.vertices))

    def __getitem__(self, v: int) -> int:
        return self.values[v]

    def constant_value(self) -> int | None:
        vals = set(self.values)
        return vals.pop() if len(vals) == 1 else None


def as_rank_function(tree: BinaryTree, f) -> RankFunction:
    """Coerce an int, mapping, or RankFunction to a RankFunction for ``tree``."""
    if isinstance(f, RankFunction):
        if len(f.values) != tree.n_vertices:
            raise InvalidArgumentError("rank function size does not match the tree")
        return f
    if isinstance(f, int):
        return RankFunction.constant(tree, f)
    if isinstance(f, Mapping):
        return RankFunction.from_map(tree, f)
    raise InvalidArgumentError(f"cannot interpret {f!r} as a rank function")


def normalize_rank_function(tree: BinaryTree, f, dims: Sequence[int]) -> RankFunction:
    """Clamp redundant rank bounds without changing the variety.

    Leaf values are clamped to the leaf dimension and node values are
    repeatedly clamped to the product of their children's values until
    stable.  A zero anywhere flags the zero variety.
    """
    dims = _check_dims(tree, dims)
    vals = list(as_rank_function(tree, f).values)
    if any(v < 0 for v in vals):
        raise InvalidArgumentError("rank values must be non-negative")
    for v in tree.vertices:
        if tree.is_leaf(v):
            vals[v] = min(vals[v], dims[tree.slot_of[v] - 1])
    order = [v for v in tree.postorder() if not tree.is_leaf(v)]
    changed = True
    while changed:
        changed = False
        for v in order:
            left, right = tree.children_of(v)
            cap = vals[left] * vals[right]
            if vals[v] > cap:
                vals[v] = cap
                changed = True
    return RankFunction(tuple(vals), zero_variety=any(x == 0 for x in vals))


def effective_ranks(tree: BinaryTree, f: RankFunction,
                    root_dim: int = 1) -> dict[int, int]:
    """Root-down reduced rank bounds actually realizable by members.

    The root gets ``root_dim`` (1 for a single tensor); each child's bound
    is capped by the parent's effective rank times the sibling's bound.
    Expects a normalized rank function.
    """
    vals = f.values
    fp = {0: min(root_dim, vals[0])}
    stack = [0]
    while stack:
        v = stack.pop()
        if tree.is_leaf(v):
            continue
        left, right = tree.children_of(v)
        fp[left] = min(fp[v] * vals[right], vals[left])
        fp[right] = min(fp[v] * vals[left], vals[right])
        stack.extend((left, right))
    return fp


def variety_dimension(tree: BinaryTree, f, dims: Sequence[int]) -> int:
    """Dimension of the variety from the effective-rank formula."""
    dims = _check_dims(tree, dims)
    fr = normalize_rank_function(tree, f, dims)
    if fr.zero_variety:
        return 0
    fp = effective_ranks(tree, fr)
    total = 1
    for v in tree.nodes:
        left, right = tree.children_of(v)
        total += (fp[left] * fp[right] - fp[v]) * fp[v]
    for v in tree.leaf_slots:
        d = dims[tree.slot_of[v] - 1]
        total += (d - fp[v]) * fp[v]
    return total


def constant_dimension_shortcut(tree: BinaryTree, r: int,
                                dims: Sequence[int]) -> int | None:
    """Closed-form dimension display for a constant rank bound ``r``.

    Only quoted when the effective ranks stay at ``r`` away from the root;
    returns None otherwise.  Known to overcount against the effective-rank
    formula for r >= 2 (by ``2*r*r*(r-1)``); callers should compare with
    :func:`variety_dimension`, which is the normative value.
    """
    dims = _check_dims(tree, dims)
    fr = normalize_rank_function(tree, r, dims)
    if fr.zero_variety:
        return None
    fp = effective_ranks(tree, fr)
    if any(v != tree.root and fp[v] != r for v in tree.vertices):
        return None
    n = tree.n_leaves
    return n * r * r * (r - 1) + r * r + sum((d - r) * r for d in dims)


def dimension_summary(tree: BinaryTree, f, dims: Sequence[int]) -> dict:
    """Normative dimension plus the constant-rank display and agreement flag."""
    dims = _check_dims(tree, dims)
    dim = variety_dimension(tree, f, dims)
    r = as_rank_function(tree, f).constant_value()
    shortcut = constant_dimension_shortcut(tree, r, dims) if r is not None else None
    return {
        "dimension": dim,
        "constant_rank": r,
        "constant_shortcut": shortcut,
        "shortcut_agrees": (shortcut == dim) if shortcut is not None else None,
    }


class MembershipResult(NamedTuple):
    member: bool
    profile: dict[int, int]


def rank_profile(t: DenseTensor, tree: BinaryTree,
                 ordering: LeafOrdering | None = None,
                 tolerance: float | None = None) -> dict[int, int]:
    """Measured flattening rank at every vertex of the tree."""
    ordering = _check_compatible(t, tree, ordering)
    tol = resolve_tolerance(t.arith, tolerance)
    return {
        v: flattening_rank(t, ordering.map_slots(tree.descendant_leaves(v)), tol)
        for v in tree.vertices
    }


def is_member(t: DenseTensor, tree: BinaryTree, f,
              ordering: LeafOrdering | None = None,
              tolerance: float | None = None) -> MembershipResult:
    """Membership test against per-vertex rank bounds, with the full profile."""
    fr = as_rank_function(tree, f)
    profile = rank_profile(t, tree, ordering, tolerance)
    ok = all(profile[v] <= fr[v] for v in tree.vertices)
    return MembershipResult(ok, profile)


@dataclass
class SubspaceChain:
    """Nested per-vertex subspaces in local (child-product) coordinates.

    ``bases[v]`` has one row per basis vector of the vertex subspace.  Leaf
    rows are coordinates in the leaf's factor space; node rows are
    coefficients over the row-major pairing of the children's bases, so the
    nesting property holds structurally.
    """

    tree: BinaryTree
    dims: tuple[int, ...]
    ordering: LeafOrdering
    arith: str
    bases: dict[int, np.ndarray]

    def dim(self, v: int) -> int:
        return int(self.bases[v].shape[0])

    def factor_block(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self.ordering.map_slots(self.tree.descendant_leaves(v))))

    def ambient_basis(self, v: int) -> np.ndarray:
        """Basis of the vertex subspace in the coordinates of its factor block."""
        if self.tree.is_leaf(v):
            return self.bases[v]
        left, right = self.tree.children_of(v)
        product = _product_basis(
            self.ambient_basis(left), self.factor_block(left),
            self.ambient_basis(right), self.factor_block(right), self.dims)
        return np.dot(self.bases[v], product)


def sample_member(tree: BinaryTree, f, dims: Sequence[int], seed: int,
                  arith: str = RATIONAL,
                  max_resamples: int = MAX_RESAMPLES) -> tuple[DenseTensor, SubspaceChain]:
    """Generic member of the variety with its certifying subspace chain.

    Subspaces are drawn with uniform integer coordinates and the realized
    rank profile is checked against the effective ranks at every vertex;
    degenerate draws are retried up to ``max_resamples`` times.  Factors are
    the leaf slots in canonical order.
    """
    dims = _check_dims(tree, dims)
    fr = normalize_rank_function(tree, f, dims)
    identity = LeafOrdering.identity(tree.n_leaves)
    if fr.zero_variety:
        bases = _zero_bases(tree, dims)
        return DenseTensor.zeros(dims, arith), SubspaceChain(tree, dims, identity, arith, bases)
    fp = effective_ranks(tree, fr)
    rng = random.Random(seed)
    tol = resolve_tolerance(arith, None)
    offender = None
    for _ in range(max_resamples + 1):
        local = _random_local_bases(tree, fp, dims, rng, arith)
        ambient = _expand_ambient(tree, local, dims, identity)
        t = DenseTensor(ambient[tree.root].reshape(dims), arith)
        profile = rank_profile(t, tree, identity, tol)
        offender = next((v for v in tree.vertices if profile[v] != fp[v]), None)
        if offender is None:
            bases = {v: _canonical_rows(m, arith, tol) for v, m in local.items()}
            return t, SubspaceChain(tree, dims, identity, arith, bases)
    raise SamplingFailureError(
        f"sampling kept missing the target rank at vertex {offender}",
        vertex=offender)


def extract_subspaces(t: DenseTensor, tree: BinaryTree,
                      ordering: LeafOrdering | None = None,
                      tolerance: float | None = None) -> SubspaceChain:
    """Minimal nested subspaces supporting ``t``, from its flattenings.

    The vertex subspace is the column space of the flattening along the
    vertex's factor block; node bases are re-expressed in the children's
    product coordinates.  Failure to nest within tolerance signals
    numerical breakdown.
    """
    if t.is_zero():
        raise InvalidArgumentError("cannot extract subspaces of the zero tensor")
    ordering = _check_compatible(t, tree, ordering)
    tol = resolve_tolerance(t.arith, tolerance)
    dims = t.shape
    blocks = {v: tuple(sorted(ordering.map_slots(tree.descendant_leaves(v))))
              for v in tree.vertices}

    ambient: dict[int, np.ndarray] = {}
    for v in tree.vertices:
        m = flatten(t, blocks[v]).matrix
        if t.arith == RATIONAL:
            basis = _linalg.exact_row_basis(m.T.tolist())
            ambient[v] = _object_matrix(basis, m.shape[0])
        else:
            ambient[v] = _linalg.float_row_basis(m.T, tol)

    local: dict[int, np.ndarray] = {}
    for v in tree.vertices:
        if tree.is_leaf(v):
            local[v] = ambient[v]
            continue
        left, right = tree.children_of(v)
        product = _product_basis(ambient[left], blocks[left],
                                 ambient[right], blocks[right], dims)
        rows = []
        for row in ambient[v]:
            if t.arith == RATIONAL:
                coeffs = _linalg.solve_in_row_span(product.tolist(), list(row))
            else:
                coeffs = _linalg.float_solve_in_row_span(product, row, tol)
            if coeffs is None:
                raise InternalInconsistencyError(
                    f"subspace at vertex {v} escapes its children's product")
            rows.append(list(coeffs))
        local[v] = (_object_matrix(rows, product.shape[0]) if t.arith == RATIONAL
                    else np.array(rows, dtype=float).reshape(len(rows), product.shape[0]))
    return SubspaceChain(tree, tuple(dims), ordering, t.arith, local)


# -- internals -------------------------------------------------------------------


def _check_dims(tree: BinaryTree, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if len(dims) != tree.n_leaves:
        raise InvalidArgumentError("one dimension per leaf slot is required")
    if any(d < 1 for d in dims):
        raise InvalidArgumentError("leaf dimensions must be positive")
    return dims


def _check_compatible(t: DenseTensor, tree: BinaryTree,
                      ordering: LeafOrdering | None) -> LeafOrdering:
    if ordering is None:
        ordering = LeafOrdering.identity(tree.n_leaves)
    if ordering.n != tree.n_leaves:
        raise InvalidArgumentError("ordering size does not match the tree")
    if t.n_factors != tree.n_leaves:
        raise InvalidArgumentError("tensor order does not match the leaf count")
    return ordering


def _local_width(tree: BinaryTree, fp: Mapping[int, int], dims: Sequence[int],
                 v: int) -> int:
    if tree.is_leaf(v):
        return dims[tree.slot_of[v] - 1]
    left, right = tree.children_of(v)
    return fp[left] * fp[right]


def _random_local_bases(tree: BinaryTree, fp: Mapping[int, int],
                        dims: Sequence[int], rng: random.Random,
                        arith: str) -> dict[int, np.ndarray]:
    out = {}
    for v in tree.vertices:
        rows, cols = fp[v], _local_width(tree, fp, dims, v)
        flat = [rng.randint(SAMPLE_LOW, SAMPLE_HIGH) for _ in range(rows * cols)]
        if arith == RATIONAL:
            m = np.array([Fraction(x) for x in flat], dtype=object).reshape(rows, cols)
        else:
            m = np.array(flat, dtype=float).reshape(rows, cols)
        out[v] = m
    return out


def _zero_bases(tree: BinaryTree, dims: Sequence[int]) -> dict[int, np.ndarray]:
    fp = {v: 0 for v in tree.vertices}
    return {v: np.zeros((0, _local_width(tree, fp, dims, v)), dtype=object)
            for v in tree.vertices}


def _expand_ambient(tree: BinaryTree, local: Mapping[int, np.ndarray],
                    dims: Sequence[int], ordering: LeafOrdering) -> dict[int, np.ndarray]:
    blocks = {v: tuple(sorted(ordering.map_slots(tree.descendant_leaves(v))))
              for v in tree.vertices}
    ambient: dict[int, np.ndarray] = {}
    for v in tree.postorder():
        if tree.is_leaf(v):
            ambient[v] = local[v]
        else:
            left, right = tree.children_of(v)
            product = _product_basis(ambient[left], blocks[left],
                                     ambient[right], blocks[right], dims)
            ambient[v] = np.dot(local[v], product)
    return ambient


def _product_basis(b1: np.ndarray, factors1: tuple[int, ...],
                   b2: np.ndarray, factors2: tuple[int, ...],
                   dims: Sequence[int]) -> np.ndarray:
    """Row-major pairing of two bases, columns reordered to ascending factors."""
    r1, _ = b1.shape
    r2, _ = b2.shape
    prod = (b1[:, None, :, None] * b2[None, :, None, :]).reshape(r1 * r2, -1)
    all_factors = factors1 + factors2
    if list(all_factors) == sorted(all_factors):
        return prod
    order = sorted(range(len(all_factors)), key=lambda i: all_factors[i])
    shaped = prod.reshape((r1 * r2,) + tuple(dims[f - 1] for f in all_factors))
    shaped = np.transpose(shaped, [0] + [1 + i for i in order])
    return shaped.reshape(r1 * r2, -1)


def _canonical_rows(matrix: np.ndarray, arith: str, tol: float) -> np.ndarray:
    if arith == RATIONAL:
        basis = _linalg.exact_row_basis(matrix.tolist())
        return _object_matrix(basis, matrix.shape[1])
    return _linalg.float_row_basis(matrix, tol)


def _object_matrix(rows: list, width: int) -> np.ndarray:
    arr = np.empty((len(rows), width), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            arr[i, j] = x if isinstance(x, Fraction) else Fraction(x)
    return arr
