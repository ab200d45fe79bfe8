"""JSON forms for trees, orderings, rank functions, tensors, and reports.

Rational tensor entries are serialized as strings ("-3/2") so round trips
stay exact; float tensors use JSON numbers.  ``dumps_canonical`` gives a
byte-stable encoding (sorted keys, tight separators) used for report
files and content hashes.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError
from .tensor import DenseTensor, FLOAT, RATIONAL
from .trees import BinaryTree, LeafOrdering, explicit_tree, perfect_tree, train_track_tree
from .tns import RankFunction


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def content_hash(obj) -> str:
    return hashlib.sha256(dumps_canonical(obj).encode()).hexdigest()


# -- trees -----------------------------------------------------------------------


def tree_to_json(tree: BinaryTree) -> dict:
    if tree.meta is not None:
        return dict(tree.meta)
    table: list = [None] * tree.n_vertices
    for v, (left, right) in tree.children.items():
        table[v] = [left, right]
    return {"kind": "explicit", "children": table}


def tree_from_json(obj: dict) -> BinaryTree:
    kind = obj.get("kind")
    if kind == "perfect":
        return perfect_tree(int(obj["k"]))
    if kind == "traintrack":
        return train_track_tree(int(obj["n"]))
    if kind == "explicit":
        return explicit_tree(obj["children"])
    raise InvalidArgumentError(f"unknown tree kind {kind!r}")


def ordering_to_json(ordering: LeafOrdering) -> list[int]:
    return list(ordering.image)


def ordering_from_json(obj) -> LeafOrdering:
    return LeafOrdering(tuple(int(x) for x in obj))


# -- rank functions ---------------------------------------------------------------


def rank_function_to_json(f: RankFunction) -> dict:
    constant = f.constant_value()
    if constant is not None:
        return {"constant": constant}
    return {"values": {str(v): x for v, x in enumerate(f.values)}}


def rank_function_from_json(obj: dict, tree: BinaryTree) -> RankFunction:
    if "constant" in obj:
        return RankFunction.constant(tree, int(obj["constant"]))
    if "values" in obj:
        return RankFunction.from_map(tree, {int(k): int(v) for k, v in obj["values"].items()})
    raise InvalidArgumentError("rank function JSON needs 'constant' or 'values'")


# -- tensors ----------------------------------------------------------------------


def tensor_to_json(t: DenseTensor) -> dict:
    if t.arith == RATIONAL:
        entries = [str(x) for x in t.entries()]
    else:
        entries = [float(x) for x in t.entries()]
    return {"shape": list(t.shape), "arith": t.arith, "entries": entries}


def tensor_from_json(obj: dict) -> DenseTensor:
    shape = tuple(int(d) for d in obj["shape"])
    arith = obj.get("arith", RATIONAL)
    entries = obj["entries"]
    expected = 1
    for d in shape:
        expected *= d
    if len(entries) != expected:
        raise InvalidArgumentError("entry count does not match the shape")
    if arith == RATIONAL:
        data = np.array([Fraction(str(e)) for e in entries], dtype=object).reshape(shape)
    elif arith == FLOAT:
        data = np.array([float(e) for e in entries], dtype=float).reshape(shape)
    else:
        raise InvalidArgumentError(f"unknown arithmetic {arith!r}")
    return DenseTensor(data, arith)


def profile_to_json(profile: dict[int, int]) -> dict:
    return {str(v): int(rank) for v, rank in sorted(profile.items())}
