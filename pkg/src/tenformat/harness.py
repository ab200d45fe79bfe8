"""Certification sweeps and the independent dimension oracle.

The sweeps exercise the witness constructors across orderings and emit
self-describing reports: each item carries the parameters and seed needed
to regenerate its tensor plus a content hash of the certificate.  The
dimension oracle differentiates the parametrization of the variety at a
random integer point and computes the Jacobian's rank, independently of
the closed-form dimension.
"""

from __future__ import annotations

import itertools
import math
import random
from multiprocessing import Pool
from typing import Sequence

import numpy as np

from .errors import ConstructionFailureError, InvalidArgumentError
from .serialize import content_hash, tensor_to_json
from .tensor import flattening_rank
from .tns import effective_ranks, is_member, normalize_rank_function, variety_dimension
from .trees import BinaryTree, LeafOrdering, perfect_tree, train_track_tree
from .witness import cherry_witness, hackbusch_witness

#: Default number of fresh points/primes tried when the Jacobian rank
#: comes out below the closed-form value.
ORACLE_ATTEMPTS = 3


# -- Jacobian dimension oracle ------------------------------------------------------


def jacobian_dimension_oracle(tree: BinaryTree, f, dims: Sequence[int],
                              seed: int = 0,
                              attempts: int = ORACLE_ATTEMPTS) -> int:
    """Rank of the parametrization Jacobian at a random integer point.

    The parametrization maps local subspace coordinates (one matrix per
    vertex) to the ambient tensor; its Jacobian rank at a generic point is
    the variety's dimension.  Ranks are computed exactly modulo a random
    28-bit prime, which certifies them as lower bounds; degenerate points
    are retried with fresh points and primes.
    """
    dims = tuple(int(d) for d in dims)
    fr = normalize_rank_function(tree, f, dims)
    if fr.zero_variety:
        return 0
    fp = effective_ranks(tree, fr)
    formula = variety_dimension(tree, fr, dims)
    rng = random.Random(seed)
    best = 0
    for _ in range(max(1, attempts)):
        p = _random_prime(rng, 1 << 27, 1 << 28)
        jac = _jacobian_mod_p(tree, fp, dims, rng, p)
        best = max(best, _rank_mod_p(jac, p))
        if best >= formula:
            break
    return best


def _jacobian_mod_p(tree: BinaryTree, fp: dict, dims: tuple[int, ...],
                    rng: random.Random, p: int) -> np.ndarray:
    # Point: one integer matrix per vertex (leaf: fp x d, node: fp x fp1*fp2).
    point = {}
    for v in tree.vertices:
        rows = fp[v]
        if tree.is_leaf(v):
            cols = dims[tree.slot_of[v] - 1]
        else:
            left, right = tree.children_of(v)
            cols = fp[left] * fp[right]
        mat = np.array([rng.randint(-10, 10) for _ in range(rows * cols)],
                       dtype=np.int64).reshape(rows, cols) % p
        point[v] = mat

    # Ambient bases bottom-up: B_v = N_v (B_left kron B_right) mod p.
    widths = {}
    bases = {}
    for v in tree.postorder():
        if tree.is_leaf(v):
            bases[v] = point[v]
            widths[v] = dims[tree.slot_of[v] - 1]
        else:
            left, right = tree.children_of(v)
            kron = _kron_mod_p(bases[left], bases[right], p)
            bases[v] = (point[v] @ kron) % p
            widths[v] = widths[left] * widths[right]

    # Contexts top-down: t = sum_i C_v[i] (x) B_v[i], C_v of shape
    # (fp, width_before, width_after) around the vertex's contiguous block.
    contexts = {tree.root: np.ones((1, 1, 1), dtype=np.int64)}
    stack = [tree.root]
    while stack:
        v = stack.pop()
        if tree.is_leaf(v):
            continue
        left, right = tree.children_of(v)
        c = contexts[v]
        n_mat = point[v].reshape(fp[v], fp[left], fp[right])
        tmp = np.einsum("ijl,ipq->jlpq", n_mat, c) % p
        contexts[left] = np.einsum("jlpq,lx->jpxq", tmp, bases[right]).reshape(
            fp[left], c.shape[1], widths[right] * c.shape[2]) % p
        contexts[right] = np.einsum("jlpq,jx->lpxq", tmp, bases[left]).reshape(
            fp[right], c.shape[1] * widths[left], c.shape[2]) % p
        stack.extend((left, right))

    total_dim = math.prod(dims)
    blocks = []
    for v in tree.vertices:
        if tree.is_leaf(v):
            kron = np.eye(dims[tree.slot_of[v] - 1], dtype=np.int64)
        else:
            left, right = tree.children_of(v)
            kron = _kron_mod_p(bases[left], bases[right], p)
        c = contexts[v]
        block = np.einsum("ipq,jd->ijpdq", c, kron) % p
        blocks.append(block.reshape(-1, total_dim))
    return np.concatenate(blocks, axis=0)


def _kron_mod_p(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    out = (a[:, None, :, None] * b[None, :, None, :]) % p
    return out.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])


def _rank_mod_p(matrix: np.ndarray, p: int) -> int:
    m = matrix % p
    n_rows, n_cols = m.shape
    rank = 0
    for c in range(n_cols):
        col = m[rank:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            m[[rank, piv]] = m[[piv, rank]]
        inv = pow(int(m[rank, c]), p - 2, p)
        m[rank, c:] = (m[rank, c:] * inv) % p
        below = m[rank + 1:, c]
        hot = np.nonzero(below)[0]
        if hot.size:
            rows = rank + 1 + hot
            m[rows, c:] = (m[rows, c:] - np.outer(m[rows, c], m[rank, c:])) % p
        rank += 1
        if rank == n_rows:
            break
    return rank


def _random_prime(rng: random.Random, lo: int, hi: int) -> int:
    while True:
        cand = rng.randrange(lo | 1, hi, 2)
        if _is_probable_prime(cand):
            return cand


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# -- ordering sweeps ----------------------------------------------------------------


def normalized_orderings(n: int):
    """All train-track slot orderings with the first slot fixed at factor 1.

    Arbitrary orderings reduce to these by relabeling the perfect tree's
    factors along a tree symmetry, so the sweep size is (n-1)! instead of n!.
    """
    for tail in itertools.permutations(range(2, n + 1)):
        yield (1,) + tail


def sampled_orderings(n: int, count: int, rng: random.Random):
    seen = set()
    values = list(range(2, n + 1))
    limit = math.factorial(n - 1)
    while len(seen) < min(count, limit):
        rng.shuffle(values)
        sigma = (1,) + tuple(values)
        if sigma not in seen:
            seen.add(sigma)
            yield sigma


def _hackbusch_item(args) -> dict:
    index, k, r, sigma, dims, seed = args
    threshold = r ** ((k + 1) // 2)
    record = {"index": index, "sigma": list(sigma), "seed": seed,
              "threshold": threshold}
    try:
        t, j = hackbusch_witness(k, r, sigma, dims, seed=seed)
    except ConstructionFailureError as exc:
        record.update({"j": None, "rank": None, "ok": False, "error": str(exc)})
        return record
    rank = flattening_rank(t, frozenset(sigma[:j]))
    record.update({
        "j": j,
        "rank": rank,
        "ok": bool(rank >= threshold),
        "tensor_sha256": content_hash(tensor_to_json(t)),
    })
    return record


def verify_hackbusch_sweep(k: int, r: int, orderings: str = "all",
                           sample_size: int | None = None, seed: int = 0,
                           jobs: int = 1,
                           dims: Sequence[int] | None = None) -> dict:
    """Run the witness construction over train-track orderings and report.

    ``orderings`` is "all" (k <= 3 only; (n-1)! normalized orderings) or
    "sample" with ``sample_size`` distinct random normalized orderings.
    Per-item seeds are ``seed ^ index`` so reruns of any single item are
    reproducible in isolation.
    """
    n = 2**k
    dims = tuple(dims) if dims is not None else (r,) * n
    if orderings == "all":
        if k > 3:
            raise InvalidArgumentError("exhaustive sweeps are limited to k <= 3")
        sigmas = list(normalized_orderings(n))
    elif orderings == "sample":
        if not sample_size or sample_size < 1:
            raise InvalidArgumentError("sample sweeps need a positive sample size")
        sigmas = list(sampled_orderings(n, sample_size, random.Random(seed)))
    else:
        raise InvalidArgumentError("orderings must be 'all' or 'sample'")
    tasks = [(i, k, r, sigma, dims, seed ^ i) for i, sigma in enumerate(sigmas)]
    items = _run_parallel(_hackbusch_item, tasks, jobs)
    failures = [it["index"] for it in items if not it["ok"]]
    return {
        "params": {"sweep": "hackbusch", "k": k, "r": r, "dims": list(dims),
                   "orderings": orderings, "count": len(items), "seed": seed,
                   "normalization": "first slot fixed to factor 1"},
        "items": items,
        "summary": {"total": len(items), "failures": failures,
                    "all_ok": not failures,
                    "threshold": r ** ((k + 1) // 2)},
    }


def _cherry_item(args) -> dict:
    index, k, r, sigma, dims, seed = args
    threshold = r * r
    record = {"index": index, "sigma": list(sigma), "seed": seed,
              "threshold": threshold}
    try:
        t, cherry = cherry_witness(k, r, sigma, dims, seed=seed)
    except ConstructionFailureError as exc:
        record.update({"cherry": None, "rank": None, "ok": False,
                       "error": str(exc)})
        return record
    rank = flattening_rank(t, frozenset(cherry))
    record.update({
        "cherry": list(cherry),
        "rank": rank,
        "ok": bool(rank == threshold),
        "tensor_sha256": content_hash(tensor_to_json(t)),
    })
    return record


def verify_cherry_sweep(k: int, r: int, count: int = 500, seed: int = 0,
                        jobs: int = 1,
                        dims: Sequence[int] | None = None) -> dict:
    """Run the cherry construction over random leaf matchings and report."""
    if count < 1:
        raise InvalidArgumentError("count must be positive")
    n = 2**k
    dims = tuple(dims) if dims is not None else (r,) * n
    rng = random.Random(seed)
    sigmas = []
    values = list(range(1, n + 1))
    for _ in range(count):
        rng.shuffle(values)
        sigmas.append(tuple(values))
    tasks = [(i, k, r, sigma, dims, seed ^ i) for i, sigma in enumerate(sigmas)]
    items = _run_parallel(_cherry_item, tasks, jobs)
    failures = [it["index"] for it in items if not it["ok"]]
    return {
        "params": {"sweep": "cherry", "k": k, "r": r, "dims": list(dims),
                   "count": count, "seed": seed},
        "items": items,
        "summary": {"total": len(items), "failures": failures,
                    "all_ok": not failures, "threshold": r * r},
    }


def _run_parallel(worker, tasks, jobs: int) -> list[dict]:
    jobs = max(1, int(jobs))
    if jobs == 1 or len(tasks) <= 1:
        results = [worker(t) for t in tasks]
    else:
        with Pool(processes=jobs) as pool:
            results = pool.map(worker, tasks, chunksize=max(1, len(tasks) // (4 * jobs)))
    return sorted(results, key=lambda item: item["index"])


# -- empirical containment helper ----------------------------------------------------


def check_containment(tree_a: BinaryTree, tree_b: BinaryTree, r: int,
                      exponent: int, dims: Sequence[int], seeds: Sequence[int],
                      ordering_b: LeafOrdering | None = None) -> list[int]:
    """Seeds whose sampled members of the source variety violate the target bounds.

    Members are sampled with the canonical slot ordering of ``tree_a``;
    ``ordering_b`` maps the target tree's slots onto the same factors.
    """
    from .tns import sample_member

    failures = []
    for s in seeds:
        t, _ = sample_member(tree_a, r, dims, seed=s)
        if not is_member(t, tree_b, r**exponent, ordering_b).member:
            failures.append(s)
    return failures
