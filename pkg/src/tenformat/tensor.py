"""Dense multi-way arrays over exact rationals or floats.

A tensor's factors are indexed 1..n.  Rational tensors hold
``fractions.Fraction`` entries in an object ndarray, so every product,
flattening, and rank below is exact; float tensors use float64 and rank
decisions go through an SVD with a relative tolerance.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from . import _linalg
from .errors import InvalidArgumentError
from .trees import LeafSet

RATIONAL = "rational"
FLOAT = "float"

#: Relative singular-value cutoff used when no tolerance is given for floats.
DEFAULT_TOLERANCE = 1e-9

_to_fraction = np.frompyfunc(
    lambda x: x if isinstance(x, Fraction) else Fraction(x), 1, 1
)


class DenseTensor:
    """Dense tensor with a homogeneous scalar kind.

    Attributes
    ----------
    data:  ndarray of shape ``shape``; dtype object (Fraction) or float64.
    shape: per-factor dimensions ``(d_1, ..., d_n)``.
    arith: ``"rational"`` or ``"float"``.
    """

    def __init__(self, data, arith: str = RATIONAL):
        if arith not in (RATIONAL, FLOAT):
            raise InvalidArgumentError(f"unknown arithmetic {arith!r}")
        if arith == RATIONAL:
            arr = np.asarray(data, dtype=object)
            arr = _to_fraction(arr)
        else:
            arr = np.asarray(data, dtype=float)
        if arr.ndim < 1:
            arr = arr.reshape(1)
        if any(d < 1 for d in arr.shape):
            raise InvalidArgumentError("all factor dimensions must be positive")
        self.data = arr
        self.arith = arith

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def n_factors(self) -> int:
        return self.data.ndim

    @classmethod
    def zeros(cls, shape: Sequence[int], arith: str = RATIONAL) -> "DenseTensor":
        if arith == RATIONAL:
            return cls(np.full(tuple(shape), Fraction(0), dtype=object), arith)
        return cls(np.zeros(tuple(shape)), arith)

    @classmethod
    def random_integer(cls, shape: Sequence[int], rng: random.Random,
                       low: int = -10, high: int = 10,
                       arith: str = RATIONAL) -> "DenseTensor":
        """Tensor with i.i.d. uniform integer entries in ``[low, high]``."""
        flat = [rng.randint(low, high) for _ in range(math.prod(shape))]
        if arith == RATIONAL:
            arr = np.array([Fraction(x) for x in flat], dtype=object).reshape(tuple(shape))
        else:
            arr = np.array(flat, dtype=float).reshape(tuple(shape))
        return cls(arr, arith)

    def is_zero(self) -> bool:
        if self.arith == RATIONAL:
            return not any(bool(x) for x in self.data.flat)
        return not np.any(self.data)

    def entries(self) -> list:
        """Row-major list of entries."""
        return list(self.data.reshape(-1))

    def permute_factors(self, perm: Sequence[int]) -> "DenseTensor":
        """Reindex factors: new factor ``i`` is old factor ``perm[i-1]``."""
        if sorted(perm) != list(range(1, self.n_factors + 1)):
            raise InvalidArgumentError("perm must be a bijection of 1..n")
        return DenseTensor(np.transpose(self.data, [p - 1 for p in perm]), self.arith)

    def to_float(self) -> "DenseTensor":
        if self.arith == FLOAT:
            return self
        return DenseTensor(self.data.astype(float), FLOAT)

    def equals(self, other: "DenseTensor") -> bool:
        return (self.arith == other.arith and self.shape == other.shape
                and bool(np.all(self.data == other.data)))

    def __repr__(self) -> str:
        return f"DenseTensor(shape={self.shape}, arith={self.arith!r})"


@dataclass
class FlatMatrix:
    """Matricization of a tensor along a factor split.

    Rows are indexed by multi-indices over ``row_factors`` (the chosen leaf
    subset, ascending), columns by the complement, both in lexicographic
    order by ascending factor index.
    """

    matrix: np.ndarray
    row_factors: tuple[int, ...]
    col_factors: tuple[int, ...]
    arith: str


def outer(tensors: Sequence[DenseTensor],
          factor_assignment: Sequence[Sequence[int]]) -> DenseTensor:
    """Tensor product of blocks placed on prescribed factors.

    ``factor_assignment[i]`` lists, axis by axis, the global factor index of
    each axis of ``tensors[i]``; together the lists must partition ``1..n``.
    """
    if len(tensors) != len(factor_assignment):
        raise InvalidArgumentError("one factor list per tensor is required")
    if not tensors:
        raise InvalidArgumentError("need at least one tensor")
    flat: list[int] = []
    for t, factors in zip(tensors, factor_assignment):
        if t.n_factors != len(factors):
            raise InvalidArgumentError("factor list does not match tensor order")
        flat.extend(int(f) for f in factors)
    n = len(flat)
    if sorted(flat) != list(range(1, n + 1)):
        raise InvalidArgumentError("factor assignment must partition 1..n")
    ariths = {t.arith for t in tensors}
    if len(ariths) != 1:
        raise InvalidArgumentError("mixed scalar kinds in outer product")
    data = reduce(np.multiply.outer, (t.data for t in tensors))
    axes = [flat.index(f) for f in range(1, n + 1)]
    return DenseTensor(np.transpose(data, axes), ariths.pop())


def flatten(t: DenseTensor, subset: Iterable[int]) -> FlatMatrix:
    """Matrix of the contraction along ``subset`` versus its complement.

    Empty or full subsets are allowed and give a single-column or
    single-row matrix by convention.
    """
    subset = frozenset(subset)
    n = t.n_factors
    if not subset <= frozenset(range(1, n + 1)):
        raise InvalidArgumentError("subset contains factor indices outside 1..n")
    rows = tuple(sorted(subset))
    cols = tuple(sorted(frozenset(range(1, n + 1)) - subset))
    axes = [f - 1 for f in rows + cols]
    n_rows = math.prod(t.shape[f - 1] for f in rows) if rows else 1
    n_cols = math.prod(t.shape[f - 1] for f in cols) if cols else 1
    matrix = np.transpose(t.data, axes).reshape(n_rows, n_cols)
    return FlatMatrix(matrix, rows, cols, t.arith)


def matrix_rank(m: FlatMatrix | np.ndarray, tolerance: float = 0.0) -> int:
    """Rank of a flattening: exact elimination or SVD cutoff.

    Rational input demands ``tolerance == 0``; float input demands a
    positive tolerance (relative to the largest singular value).
    """
    matrix = m.matrix if isinstance(m, FlatMatrix) else np.asarray(m)
    rational = matrix.dtype == object
    if rational:
        if tolerance != 0:
            raise InvalidArgumentError("rational rank requires tolerance == 0")
        return _linalg.exact_rank(matrix.tolist())
    if tolerance <= 0:
        raise InvalidArgumentError("float rank requires a positive tolerance")
    return _linalg.float_rank(matrix, tolerance)


def flattening_rank(t: DenseTensor, subset: Iterable[int],
                    tolerance: float | None = None) -> int:
    """Rank of the flattening of ``t`` along ``subset``."""
    return matrix_rank(flatten(t, subset), resolve_tolerance(t.arith, tolerance))


def resolve_tolerance(arith: str, tolerance: float | None) -> float:
    """Fill in the per-arithmetic default and check the sign contract."""
    if tolerance is None:
        return 0.0 if arith == RATIONAL else DEFAULT_TOLERANCE
    if arith == RATIONAL and tolerance != 0:
        raise InvalidArgumentError("rational arithmetic requires tolerance == 0")
    if arith == FLOAT and tolerance <= 0:
        raise InvalidArgumentError("float arithmetic requires a positive tolerance")
    return float(tolerance)


def complement(subset: Iterable[int], n: int) -> LeafSet:
    """Complement of a factor set within 1..n."""
    return frozenset(range(1, n + 1)) - frozenset(subset)
