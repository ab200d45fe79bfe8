"""Delimited and graphical renderings of sweep reports.

A report bundle directory holds the canonical JSON report, a CSV table of
the per-item records, and a rendered overview figure, so sweep outcomes
can be inspected without re-running anything.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .serialize import dumps_canonical

_CSV_FIELDS = ("index", "sigma", "j", "cherry", "rank", "threshold", "ok", "seed",
               "tensor_sha256", "error")


def report_csv_rows(report: dict) -> list[list]:
    rows = [list(_CSV_FIELDS)]
    for item in report["items"]:
        row = []
        for field in _CSV_FIELDS:
            value = item.get(field, "")
            if isinstance(value, (list, tuple)):
                value = " ".join(str(x) for x in value)
            row.append(value)
        rows.append(row)
    return rows


def write_report_csv(report: dict, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(report_csv_rows(report))
    return path


def render_report_figure(report: dict, path) -> Path:
    """Rank-per-item scatter with the pass threshold, plus a summary histogram."""
    path = Path(path)
    items = report["items"]
    indices = [it["index"] for it in items]
    ranks = [it["rank"] if it["rank"] is not None else -1 for it in items]
    threshold = report["summary"].get("threshold")
    ok = [bool(it["ok"]) for it in items]

    fig, (ax_rank, ax_hist) = plt.subplots(1, 2, figsize=(10, 4))
    colors = ["tab:blue" if flag else "tab:red" for flag in ok]
    ax_rank.scatter(indices, ranks, s=8, c=colors)
    if threshold is not None:
        ax_rank.axhline(threshold, color="black", linewidth=1, linestyle="--",
                        label=f"threshold {threshold}")
        ax_rank.legend(loc="lower right")
    ax_rank.set_xlabel("item index")
    ax_rank.set_ylabel("certified flattening rank")
    ax_rank.set_title(report["params"].get("sweep", "sweep"))

    js = [it.get("j") for it in items if it.get("j") is not None]
    if js:
        ax_hist.hist(js, bins=range(min(js), max(js) + 2), align="left",
                     color="tab:gray")
        ax_hist.set_xlabel("prefix length j")
    else:
        ax_hist.hist(ranks, color="tab:gray")
        ax_hist.set_xlabel("rank")
    ax_hist.set_ylabel("orderings")
    ax_hist.set_title("distribution")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def write_report_bundle(report: dict, directory) -> dict[str, Path]:
    """Write report.json, items.csv, and sweep.png into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    json_path = directory / "report.json"
    json_path.write_text(dumps_canonical(report))
    csv_path = write_report_csv(report, directory / "items.csv")
    fig_path = render_report_figure(report, directory / "sweep.png")
    return {"json": json_path, "csv": csv_path, "figure": fig_path}
