"""Full binary trees, leaf orderings, and exact leaf-set cover search.

Vertex ids are dense integers ``0..V-1`` with the root at ``0``.  Every
node stores an ordered ``(left, right)`` child pair; the orientation is
fixed by the constructors and preserved through serialization (mirror
images are distinct trees here, although they induce the same varieties
up to reindexing).  Leaf slots are numbered ``1..n`` in depth-first,
left-before-right visit order, so the descendant slots of any vertex
form a contiguous interval of slot numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InvalidArgumentError

#: A leaf set is a frozenset of 1-based slot numbers (or factor indices,
#: once an ordering has been applied).
LeafSet = frozenset


def ones_count(i: int) -> int:
    """Number of digits equal to 1 in the binary representation of ``i``."""
    if i < 0:
        raise InvalidArgumentError("ones_count requires a non-negative integer")
    return i.bit_count()


class BinaryTree:
    """Immutable rooted full binary tree.

    Parameters
    ----------
    children:
        Map from node id to its ``(left, right)`` child pair.  Vertices not
        appearing as keys are leaves.  The root must be vertex 0 and ids
        must be the dense range ``0..2L-2`` for ``L`` leaves.
    meta:
        Optional serialization hint (set by the factory constructors).
    """

    def __init__(self, children: Mapping[int, tuple[int, int]], meta: dict | None = None):
        self.children = {int(v): (int(l), int(r)) for v, (l, r) in children.items()}
        self.n_vertices = 2 * len(self.children) + 1
        self.meta = meta
        self._validate()
        self.parent = {c: v for v, pair in self.children.items() for c in pair}
        self.leaf_slots = self._dfs_leaves()
        self.slot_of = {v: s for s, v in enumerate(self.leaf_slots, start=1)}
        self._leafsets = self._descendant_slot_sets()
        self._depths = self._compute_depths()

    # -- construction helpers -------------------------------------------------

    def _validate(self) -> None:
        ids = set(range(self.n_vertices))
        child_list = [c for pair in self.children.values() for c in pair]
        if len(child_list) != len(set(child_list)):
            raise InvalidArgumentError("a vertex appears as a child more than once")
        if 0 in child_list:
            raise InvalidArgumentError("the root (vertex 0) cannot be a child")
        if not set(self.children) <= ids:
            raise InvalidArgumentError("vertex ids must be dense integers 0..V-1")
        if set(child_list) != ids - {0}:
            raise InvalidArgumentError("every non-root vertex must be exactly one child")
        seen = set()
        stack = [0]
        while stack:
            v = stack.pop()
            if v in seen:
                raise InvalidArgumentError("tree contains a cycle")
            seen.add(v)
            stack.extend(self.children.get(v, ()))
        if seen != ids:
            raise InvalidArgumentError("tree is not connected")

    def _dfs_leaves(self) -> tuple[int, ...]:
        order = []
        stack = [0]
        while stack:
            v = stack.pop()
            if v in self.children:
                left, right = self.children[v]
                stack.append(right)
                stack.append(left)
            else:
                order.append(v)
        return tuple(order)

    def _descendant_slot_sets(self) -> dict[int, LeafSet]:
        sets: dict[int, LeafSet] = {}
        for v in self._postorder():
            if v in self.children:
                left, right = self.children[v]
                sets[v] = sets[left] | sets[right]
            else:
                sets[v] = frozenset({self.slot_of[v]})
        return sets

    def _postorder(self) -> Iterator[int]:
        stack = [(0, False)]
        while stack:
            v, expanded = stack.pop()
            if expanded or v not in self.children:
                yield v
            else:
                stack.append((v, True))
                left, right = self.children[v]
                stack.append((right, False))
                stack.append((left, False))

    def _compute_depths(self) -> dict[int, int]:
        depths = {0: 0}
        stack = [0]
        while stack:
            v = stack.pop()
            for c in self.children.get(v, ()):
                depths[c] = depths[v] + 1
                stack.append(c)
        return depths

    # -- queries ---------------------------------------------------------------

    @property
    def root(self) -> int:
        return 0

    @property
    def n_leaves(self) -> int:
        return len(self.leaf_slots)

    @property
    def vertices(self) -> range:
        return range(self.n_vertices)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self.children))

    def is_leaf(self, v: int) -> bool:
        self._check_vertex(v)
        return v not in self.children

    def children_of(self, v: int) -> tuple[int, int]:
        self._check_vertex(v)
        if v not in self.children:
            raise InvalidArgumentError(f"vertex {v} is a leaf")
        return self.children[v]

    def depth(self, v: int) -> int:
        self._check_vertex(v)
        return self._depths[v]

    def descendant_leaves(self, v: int) -> LeafSet:
        """Slots of all leaves descending from ``v`` (``v`` itself if a leaf)."""
        self._check_vertex(v)
        return self._leafsets[v]

    def postorder(self) -> Iterator[int]:
        """Vertices with children before parents."""
        return self._postorder()

    @cached_property
    def _doad(self) -> frozenset:
        full = frozenset(range(1, self.n_leaves + 1))
        out = set()
        for v in self.vertices:
            s = self._leafsets[v]
            out.add(s)
            out.add(full - s)
        return frozenset(out)

    def doad_sets(self) -> frozenset:
        """All descendant-or-antidescendant leaf sets, deduplicated.

        Contains every descendant slot set and every complement, including
        the full set and the empty set.
        """
        return self._doad

    def _check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.n_vertices):
            raise InvalidArgumentError(f"unknown vertex {v!r}")

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryTree) and self.children == other.children

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.children.items())))

    def __repr__(self) -> str:
        return f"BinaryTree(leaves={self.n_leaves}, vertices={self.n_vertices})"


def perfect_tree(k: int) -> BinaryTree:
    """Perfect binary tree of depth ``k``: ``2**(k+1)-1`` vertices, ``2**k`` leaves."""
    if k < 0:
        raise InvalidArgumentError("depth k must be non-negative")
    children = {i: (2 * i + 1, 2 * i + 2) for i in range(2**k - 1)}
    return BinaryTree(children, meta={"kind": "perfect", "k": k})


def train_track_tree(n: int) -> BinaryTree:
    """Canonical train track tree with ``n`` leaves (``2n-1`` vertices).

    The shape is a left spine of nodes whose right children are leaves,
    with the deepest node carrying two leaves.  Slots run bottom-left to
    top-right, so the descendant slots of the spine nodes are exactly the
    initial intervals ``[1..j]``.
    """
    if n < 2:
        raise InvalidArgumentError("a train track tree needs at least 2 leaves")
    children: dict[int, tuple[int, int]] = {}
    current, next_id = 0, 1
    for _ in range(n - 2):
        children[current] = (next_id, next_id + 1)
        current, next_id = next_id, next_id + 2
    children[current] = (next_id, next_id + 1)
    return BinaryTree(children, meta={"kind": "traintrack", "n": n})


def explicit_tree(children_list: Sequence[Sequence[int] | None]) -> BinaryTree:
    """Tree from a per-vertex child table: entry ``v`` is ``[left, right]`` or None."""
    children = {}
    for v, pair in enumerate(children_list):
        if pair is None:
            continue
        if len(pair) != 2:
            raise InvalidArgumentError(f"vertex {v}: child entry must have two ids")
        children[v] = (pair[0], pair[1])
    tree = BinaryTree(children)
    if tree.n_vertices != len(children_list):
        raise InvalidArgumentError("child table length does not match vertex count")
    return tree


def all_tree_shapes(n_leaves: int) -> list[BinaryTree]:
    """All full binary tree shapes with ``n_leaves`` leaves, up to mirror images.

    Left subtrees never have more leaves than right subtrees, which picks one
    representative per unordered shape (Wedderburn-Etherington enumeration).
    """
    if n_leaves < 1:
        raise InvalidArgumentError("need at least one leaf")

    def structures(n: int) -> list:
        if n == 1:
            return [None]
        out = []
        for a in range(1, n // 2 + 1):
            lefts = structures(a)
            rights = structures(n - a)
            for i, l in enumerate(lefts):
                for j, r in enumerate(rights):
                    if a == n - a and i > j:
                        continue
                    out.append((l, r))
        return out

    def build(structure) -> BinaryTree:
        children: dict[int, tuple[int, int]] = {}
        counter = [0]

        def alloc() -> int:
            counter[0] += 1
            return counter[0] - 1

        def walk(node, vid: int) -> None:
            if node is None:
                return
            left, right = alloc(), alloc()
            children[vid] = (left, right)
            walk(node[0], left)
            walk(node[1], right)

        root = alloc()
        walk(structure, root)
        return BinaryTree(children)

    return [build(s) for s in structures(n_leaves)]


@dataclass(frozen=True)
class LeafOrdering:
    """Bijection from a tree's leaf slots (1..n) to tensor factor indices (1..n)."""

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", image)
        n = len(image)
        if sorted(image) != list(range(1, n + 1)):
            raise InvalidArgumentError("ordering must be a bijection onto 1..n")
        inverse = [0] * (n + 1)
        for slot, factor in enumerate(image, start=1):
            inverse[factor] = slot
        object.__setattr__(self, "_inverse", tuple(inverse))

    @classmethod
    def identity(cls, n: int) -> "LeafOrdering":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.image)

    def factor_of(self, slot: int) -> int:
        if not 1 <= slot <= self.n:
            raise InvalidArgumentError(f"slot {slot} out of range")
        return self.image[slot - 1]

    def slot_of(self, factor: int) -> int:
        if not 1 <= factor <= self.n:
            raise InvalidArgumentError(f"factor {factor} out of range")
        return self._inverse[factor]  # type: ignore[attr-defined]

    def map_slots(self, slots: Iterable[int]) -> LeafSet:
        """Image of a slot set as a factor-index set."""
        return frozenset(self.image[s - 1] for s in slots)

    def inverse(self) -> "LeafOrdering":
        return LeafOrdering(self._inverse[1:])  # type: ignore[attr-defined]

    def is_identity(self) -> bool:
        return all(f == s for s, f in enumerate(self.image, start=1))


# -- exact minimal covers ------------------------------------------------------


def descendant_cover_number(tree: BinaryTree, target: Iterable[int]) -> int | None:
    """Minimal number of descendant leaf sets whose union is exactly ``target``.

    ``target`` is a non-empty set of leaf slots.  Singletons are descendant
    sets, so a cover always exists; None is only possible for malformed input
    and is kept for defensive symmetry with the DOAD variant.
    """
    target = frozenset(target)
    _check_target(target, tree.n_leaves)
    candidates = [tree.descendant_leaves(v) for v in tree.vertices]
    return _min_exact_cover(target, candidates)


def doad_cover_number(tree: BinaryTree, ordering: LeafOrdering,
                      target: Iterable[int]) -> int | None:
    """Minimal number of DOAD sets of ``tree`` whose union is exactly ``target``.

    The DOAD sets are mapped to factor indices through ``ordering`` and the
    union is required to equal ``target`` (a non-empty set of factor indices).
    """
    target = frozenset(target)
    _check_target(target, tree.n_leaves)
    if ordering.n != tree.n_leaves:
        raise InvalidArgumentError("ordering size does not match the tree")
    candidates = [ordering.map_slots(s) for s in tree.doad_sets()]
    return _min_exact_cover(target, candidates)


def _check_target(target: frozenset, n: int) -> None:
    if not target:
        raise InvalidArgumentError("cover target must be non-empty")
    if not target <= frozenset(range(1, n + 1)):
        raise InvalidArgumentError("cover target contains indices outside 1..n")


def _min_exact_cover(target: frozenset, candidates: Sequence[frozenset]) -> int | None:
    # Iterative deepening over the number of sets; candidates not contained
    # in the target can never appear in an exact cover and are dropped.
    cands = sorted({c for c in candidates if c and c <= target},
                   key=lambda c: (-len(c), sorted(c)))
    if not cands:
        return None
    cover_by = {e: tuple(c for c in cands if e in c) for e in target}
    if any(not v for v in cover_by.values()):
        return None
    max_size = len(cands[0])
    for depth in range(1, len(target) + 1):
        if _cover_dfs(frozenset(), target, cover_by, depth, max_size, set()):
            return depth
    return None


def _cover_dfs(covered: frozenset, target: frozenset, cover_by: dict,
               depth: int, max_size: int, seen: set) -> bool:
    missing = target - covered
    if not missing:
        return True
    if depth == 0 or len(missing) > depth * max_size:
        return False
    key = (covered, depth)
    if key in seen:
        return False
    seen.add(key)
    pivot = min(missing, key=lambda e: len(cover_by[e]))
    for cand in cover_by[pivot]:
        if _cover_dfs(covered | cand, target, cover_by, depth - 1, max_size, seen):
            return True
    return False
