"""Matplotlib figures rendered next to the delimited reports.

All figures are written with fixed metadata so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SAVE_KWARGS = {"dpi": 120, "metadata": {"Software": None}}


def _save(fig, path: str | Path) -> None:
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def eval_report_figure(rows, path: str | Path) -> None:
    """Grouped bar chart of the pooled metric values (the ALL row)."""
    all_row = next((r for r in rows if r.name == "ALL"), rows[-1])
    labels = ["Rec_t", "Prec_t", "F1", "Cover_t", "F1_cover", "CoJac^T", "CoJac^P"]
    values = [
        all_row.recall,
        all_row.precision,
        all_row.f1,
        all_row.coverage,
        all_row.f1_cover,
        all_row.cojac_t,
        all_row.cojac_p,
    ]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(labels, values, color="#4878cf")
    ax.set_ylim(0, 100)
    ax.set_ylabel("score")
    ax.set_title("Alignment evaluation (pooled)")
    for i, v in enumerate(values):
        ax.text(i, v + 1.5, f"{v:.1f}", ha="center", fontsize=8)
    ax.tick_params(axis="x", labelrotation=30)
    _save(fig, path)


def salience_report_figure(rows, path: str | Path) -> None:
    all_row = next((r for r in rows if r.name == "ALL"), rows[-1])
    labels = ["token_precision", "iu_recall", "F1"]
    values = [all_row.token_precision, all_row.iu_recall, all_row.f1]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(labels, values, color="#6acc65")
    ax.set_ylim(0, 100)
    ax.set_ylabel("score")
    ax.set_title("Sentence salience (pooled)")
    for i, v in enumerate(values):
        ax.text(i, v + 1.5, f"{v:.1f}", ha="center", fontsize=8)
    _save(fig, path)


def stats_figures(cluster_sizes, clusters_per_sentence, out_dir: str | Path) -> list[Path]:
    """Histograms of cluster sizes and clusters-per-sentence counts."""
    out_dir = Path(out_dir)
    written = []
    for name, values, color in (
        ("cluster_sizes.png", cluster_sizes, "#4878cf"),
        ("clusters_per_sentence.png", clusters_per_sentence, "#d65f5f"),
    ):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        if values:
            upper = max(values)
            ax.hist(values, bins=range(1, upper + 2), color=color, edgecolor="white")
        ax.set_xlabel(name.replace(".png", "").replace("_", " "))
        ax.set_ylabel("count")
        path = out_dir / name
        _save(fig, path)
        written.append(path)
    return written
