"""Command-line interface.

Exit codes follow the claim-checking convention: 0 when the requested
claim verifies, 1 when it is falsified (or a construction fails its
certification), 2 for usage errors and malformed inputs.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

from . import harness
from .errors import (ConstructionFailureError, InternalInconsistencyError,
                     InvalidArgumentError, SamplingFailureError)
from .report import write_report_bundle
from .serialize import (dumps_canonical, ordering_from_json, profile_to_json,
                        rank_function_from_json, tensor_from_json, tensor_to_json,
                        tree_from_json, tree_to_json)
from .tensor import FLOAT, RATIONAL, flattening_rank
from .tns import dimension_summary, is_member, rank_profile, sample_member
from .transfer import transfer_exponent
from .trees import BinaryTree, LeafOrdering, perfect_tree, train_track_tree
from .witness import cherry_witness, hackbusch_witness, naive_rank_gap_example


def _wrap_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InvalidArgumentError as exc:
            raise click.UsageError(str(exc)) from exc
        except (ConstructionFailureError, SamplingFailureError,
                InternalInconsistencyError) as exc:
            click.echo(f"FAILED: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _csv_ints(value: str | None) -> tuple[int, ...] | None:
    if value is None:
        return None
    try:
        return tuple(int(x) for x in value.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise click.UsageError(f"expected a comma-separated integer list, got {value!r}") from exc


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _load_tree(kind: str, k: int | None, n: int | None) -> BinaryTree:
    if kind == "perfect":
        if k is None:
            raise click.UsageError("--k is required for perfect trees")
        return perfect_tree(k)
    if kind == "traintrack":
        if n is None and k is not None:
            n = 2**k
        if n is None:
            raise click.UsageError("--n (or --k) is required for train track trees")
        return train_track_tree(n)
    return tree_from_json(_read_json(kind))


def _load_rank(tree: BinaryTree, rank: int | None, rank_file: str | None):
    if rank_file is not None:
        return rank_function_from_json(_read_json(rank_file), tree)
    if rank is None:
        raise click.UsageError("provide --rank or --rank-file")
    return rank


def _ordering_option(value: str | None, n: int) -> LeafOrdering | None:
    if value is None:
        return None
    return ordering_from_json(_csv_ints(value))


def _emit(obj, out: str | None) -> None:
    text = dumps_canonical(obj)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _resolve_jobs(jobs: int) -> int:
    env = os.environ.get("TENFORMAT_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise click.UsageError(f"TENFORMAT_JOBS must be an integer, got {env!r}") from exc
    return max(1, jobs)


_tree_options = [
    click.option("--tree", "tree_kind", default="perfect", show_default=True,
                 help="perfect, traintrack, or a tree JSON path"),
    click.option("--k", type=int, default=None, help="Depth of the perfect tree"),
    click.option("--n", type=int, default=None, help="Leaf count of the train track tree"),
]


def _add_options(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return deco


@click.group()
@click.version_option(package_name="tenformat")
def main():
    """Tensor-format varieties on binary trees: membership, dimension,
    transfer bounds, and separation witnesses."""


@main.command("dim")
@_add_options(_tree_options)
@click.option("--rank", type=int, default=None, help="Constant rank bound")
@click.option("--rank-file", type=click.Path(), default=None, help="Rank function JSON")
@click.option("--dims", "dims_csv", required=True, help="Comma-separated leaf dimensions")
@click.option("--out", type=click.Path(), default=None)
@_wrap_errors
def dim_cmd(tree_kind, k, n, rank, rank_file, dims_csv, out):
    """Dimension of the variety for a tree, rank bound, and leaf dimensions."""
    tree = _load_tree(tree_kind, k, n)
    f = _load_rank(tree, rank, rank_file)
    dims = _csv_ints(dims_csv)
    summary = dimension_summary(tree, f, dims)
    click.echo(str(summary["dimension"]))
    if out:
        _emit(summary, out)


@main.command("bound")
@click.option("--tree-a", "tree_a_kind", required=True,
              help="perfect, traintrack, or a tree JSON path")
@click.option("--tree-b", "tree_b_kind", required=True,
              help="perfect, traintrack, or a tree JSON path")
@click.option("--k", type=int, default=None, help="Depth for perfect trees")
@click.option("--n", type=int, default=None, help="Leaf count for train track trees")
@click.option("--standard", is_flag=True, help="Use the standard left-to-right orders")
@click.option("--order-a", default=None, help="Slot-to-factor image for tree A")
@click.option("--order-b", default=None, help="Slot-to-factor image for tree B")
@click.option("--out", type=click.Path(), default=None)
@_wrap_errors
def bound_cmd(tree_a_kind, tree_b_kind, k, n, standard, order_a, order_b, out):
    """Certified containment exponent from tree A's variety into tree B's."""
    tree_a = _load_tree(tree_a_kind, k, n)
    tree_b = _load_tree(tree_b_kind, k, n)
    ordering_a = None if standard else _ordering_option(order_a, tree_a.n_leaves)
    ordering_b = None if standard else _ordering_option(order_b, tree_b.n_leaves)
    per_vertex: dict = {}
    exponent = transfer_exponent(tree_a, tree_b, ordering_a, ordering_b, per_vertex)
    click.echo(str(exponent))
    if out:
        _emit({"exponent": exponent,
               "per_vertex": {str(v): c for v, c in sorted(per_vertex.items())}}, out)


@main.command("sample")
@_add_options(_tree_options)
@click.option("--rank", type=int, default=None)
@click.option("--rank-file", type=click.Path(), default=None)
@click.option("--dims", "dims_csv", required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--arith", type=click.Choice([RATIONAL, FLOAT]), default=RATIONAL,
              show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="Write the sampled tensor JSON here")
@_wrap_errors
def sample_cmd(tree_kind, k, n, rank, rank_file, dims_csv, seed, arith, out):
    """Sample a generic member of the variety and print its rank profile."""
    tree = _load_tree(tree_kind, k, n)
    f = _load_rank(tree, rank, rank_file)
    dims = _csv_ints(dims_csv)
    t, chain = sample_member(tree, f, dims, seed, arith=arith)
    profile = {v: chain.dim(v) for v in tree.vertices}
    if out:
        _emit(tensor_to_json(t), out)
        click.echo(dumps_canonical({"profile": profile_to_json(profile)}), nl=False)
    else:
        _emit({"tensor": tensor_to_json(t),
               "profile": profile_to_json(profile)}, None)


@main.command("member")
@_add_options(_tree_options)
@click.option("--rank", type=int, default=None)
@click.option("--rank-file", type=click.Path(), default=None)
@click.option("--ordering", default=None, help="Slot-to-factor image, comma separated")
@click.option("--tensor", "tensor_path", required=True, type=click.Path())
@click.option("--tol", type=float, default=None, help="Float-mode rank tolerance")
@click.option("--out", type=click.Path(), default=None)
@_wrap_errors
def member_cmd(tree_kind, k, n, rank, rank_file, ordering, tensor_path, tol, out):
    """Check membership of a tensor in a variety; exit 1 if it is not a member."""
    tree = _load_tree(tree_kind, k, n)
    f = _load_rank(tree, rank, rank_file)
    t = tensor_from_json(_read_json(tensor_path))
    order = _ordering_option(ordering, tree.n_leaves)
    result = is_member(t, tree, f, order, tol)
    _emit({"member": result.member, "profile": profile_to_json(result.profile)}, out)
    if out:
        click.echo("member" if result.member else "not a member")
    if not result.member:
        sys.exit(1)


@main.command("rank-profile")
@_add_options(_tree_options)
@click.option("--ordering", default=None)
@click.option("--tensor", "tensor_path", required=True, type=click.Path())
@click.option("--tol", type=float, default=None)
@click.option("--out", type=click.Path(), default=None)
@_wrap_errors
def rank_profile_cmd(tree_kind, k, n, ordering, tensor_path, tol, out):
    """Flattening rank of a tensor at every vertex of the tree."""
    tree = _load_tree(tree_kind, k, n)
    t = tensor_from_json(_read_json(tensor_path))
    order = _ordering_option(ordering, tree.n_leaves)
    profile = rank_profile(t, tree, order, tol)
    _emit({"profile": profile_to_json(profile)}, out)


@main.group("witness")
def witness_group():
    """Constructive separation witnesses."""


@witness_group.command("hf-tt")
@click.option("--k", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--sigma", required=True, help="Train-track slot to factor image")
@click.option("--dims", "dims_csv", default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@_wrap_errors
def witness_hf_tt(k, r, sigma, dims_csv, seed, out):
    """Witness showing the perfect-tree format escapes smaller train-track ranks."""
    sigma_t = _csv_ints(sigma)
    dims = _csv_ints(dims_csv)
    t, j = hackbusch_witness(k, r, sigma_t, dims, seed=seed)
    rank = flattening_rank(t, frozenset(sigma_t[:j]))
    profile = rank_profile(t, perfect_tree(k))
    _emit({"j": j, "rank": rank, "threshold": r ** ((k + 1) // 2),
           "certificate": {"tensor": tensor_to_json(t),
                           "profile": profile_to_json(profile)}}, out)
    if out:
        click.echo(f"j={j} rank={rank}")


@witness_group.command("tt-hf")
@click.option("--k", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--sigma", required=True, help="Train-track slot to factor image")
@click.option("--dims", "dims_csv", default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@_wrap_errors
def witness_tt_hf(k, r, sigma, dims_csv, seed, out):
    """Witness showing the train-track format escapes smaller perfect-tree ranks."""
    sigma_t = _csv_ints(sigma)
    dims = _csv_ints(dims_csv)
    t, cherry = cherry_witness(k, r, sigma_t, dims, seed=seed)
    rank = flattening_rank(t, frozenset(cherry))
    profile = rank_profile(t, train_track_tree(2**k),
                           ordering_from_json(sigma_t))
    _emit({"cherry": list(cherry), "rank": rank, "threshold": r * r,
           "certificate": {"tensor": tensor_to_json(t),
                           "profile": profile_to_json(profile)}}, out)
    if out:
        click.echo(f"cherry={cherry} rank={rank}")


def _finish_sweep(result: dict, out, report_dir) -> None:
    if out:
        Path(out).write_text(dumps_canonical(result))
    if report_dir:
        write_report_bundle(result, report_dir)
    summary = result["summary"]
    click.echo(f"verified {summary['total'] - len(summary['failures'])}"
               f"/{summary['total']} items")
    if not summary["all_ok"]:
        bundle = {"params": result["params"],
                  "failures": [it for it in result["items"] if not it["ok"]]}
        target = Path(report_dir or ".") / "counterexamples.json"
        target.write_text(dumps_canonical(bundle))
        click.echo(f"counterexamples written to {target}", err=True)
        sys.exit(1)


@main.command("verify-hackbusch")
@click.option("--k", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--all", "sweep_all", is_flag=True, help="All normalized orderings (k <= 3)")
@click.option("--sample", "sample_size", type=int, default=None,
              help="Number of random orderings")
@click.option("--dims", "dims_csv", default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--report-dir", type=click.Path(), default=None,
              help="Write report.json, items.csv, and sweep.png here")
@_wrap_errors
def verify_hackbusch_cmd(k, r, sweep_all, sample_size, dims_csv, seed, jobs, out,
                         report_dir):
    """Sweep the separation witness over train-track orderings."""
    if sweep_all == (sample_size is not None):
        raise click.UsageError("choose exactly one of --all or --sample N")
    result = harness.verify_hackbusch_sweep(
        k, r,
        orderings="all" if sweep_all else "sample",
        sample_size=sample_size,
        seed=seed,
        jobs=_resolve_jobs(jobs),
        dims=_csv_ints(dims_csv))
    _finish_sweep(result, out, report_dir)


@main.command("verify-cherry")
@click.option("--k", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--count", type=int, default=500, show_default=True)
@click.option("--dims", "dims_csv", default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--report-dir", type=click.Path(), default=None)
@_wrap_errors
def verify_cherry_cmd(k, r, count, dims_csv, seed, jobs, out, report_dir):
    """Sweep the cherry witness over random leaf matchings."""
    result = harness.verify_cherry_sweep(
        k, r, count=count, seed=seed, jobs=_resolve_jobs(jobs),
        dims=_csv_ints(dims_csv))
    _finish_sweep(result, out, report_dir)


@main.command("example-rank5")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@_wrap_errors
def example_rank5_cmd(seed, out):
    """Measured {1,2,3,5}-flattening rank of a generic rank-2 depth-3 member
    versus the naive cover-number prediction."""
    t, measured, naive = naive_rank_gap_example(seed)
    click.echo(f"rank={measured} naive={naive}")
    if out:
        _emit({"rank": measured, "naive": naive, "tensor": tensor_to_json(t)}, out)
    if measured != 5 or naive != 8:
        sys.exit(1)


if __name__ == "__main__":
    main()
