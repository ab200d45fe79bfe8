"""Exact and floating-point linear algebra kernels (desk scale).

Exact routines work on plain Python lists of Fractions/ints; the rank
kernel is fraction-free (Bareiss) so intermediate values stay integral.
Floating routines are thin numpy wrappers.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np


def rows_as_integers(rows) -> list[list[int]]:
    """Scale each row by the lcm of its denominators; preserves row spans."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            d = x.denominator if isinstance(x, Fraction) else 1
            den = lcm(den, d)
        out.append([int(x * den) for x in row])
    return out


def integer_rank(rows: list[list[int]]) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    m = [row[:] for row in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    rank = 0
    prev = 1
    for c in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if m[i][c]), None)
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for i in range(rank + 1, n_rows):
            f = m[i][c]
            row_i = m[i]
            row_p = m[rank]
            for j in range(c, n_cols):
                num = p * row_i[j] - f * row_p[j]
                q, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("fraction-free elimination lost exactness")
                row_i[j] = q
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def exact_rank(rows) -> int:
    """Exact rank of a matrix with Fraction or int entries."""
    if not rows or not len(rows[0]):
        return 0
    return integer_rank(rows_as_integers(rows))


def fraction_rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (rows, pivot columns)."""
    m = [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if m[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        inv = Fraction(1, 1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def exact_row_basis(rows) -> list[list[Fraction]]:
    """Reduced-echelon basis of the row space (nonzero rref rows)."""
    rref, pivots = fraction_rref(rows)
    return rref[: len(pivots)]


def solve_in_row_span(basis, target) -> list[Fraction] | None:
    """Coefficients ``c`` with ``sum c_i basis_i == target``, or None.

    ``basis`` rows must be linearly independent for the coefficients to be
    unique; inconsistent systems return None.
    """
    n_basis = len(basis)
    width = len(target)
    if n_basis == 0:
        return [] if not any(target) else None
    # Solve basis^T c = target by eliminating the (width x (n_basis+1)) system.
    aug = [[Fraction(basis[j][i]) for j in range(n_basis)] + [Fraction(target[i])]
           for i in range(width)]
    rref, pivots = fraction_rref(aug)
    if n_basis in pivots:
        return None
    coeffs = [Fraction(0)] * n_basis
    for row, col in zip(rref, pivots):
        coeffs[col] = row[-1]
    return coeffs


# -- floating point -------------------------------------------------------------


def float_rank(matrix: np.ndarray, tol: float) -> int:
    """Count of singular values above ``tol`` times the largest one."""
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def float_row_basis(matrix: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the row space (rows of the result)."""
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return np.zeros((0, a.shape[1] if a.ndim == 2 else 0))
    _, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, a.shape[1]))
    rank = int(np.count_nonzero(s > tol * s[0]))
    return vt[:rank]


def float_solve_in_row_span(basis: np.ndarray, target: np.ndarray,
                            tol: float) -> np.ndarray | None:
    """Least-squares coefficients, or None when the residual exceeds ``tol``."""
    basis = np.asarray(basis, dtype=float)
    target = np.asarray(target, dtype=float)
    if basis.shape[0] == 0:
        return np.zeros(0) if np.linalg.norm(target) <= tol else None
    coeffs, *_ = np.linalg.lstsq(basis.T, target, rcond=None)
    residual = np.linalg.norm(basis.T @ coeffs - target)
    scale = max(np.linalg.norm(target), 1.0)
    if residual > tol * scale:
        return None
    return coeffs
