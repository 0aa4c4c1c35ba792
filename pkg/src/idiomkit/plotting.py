"""Figures written next to the textual reports of ``stats`` and ``score``."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .corpus import SplitStats  # noqa: E402
from .metrics import MetricReport  # noqa: E402


def _finish(fig, path):
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    metadata = {"Software": None} if str(path).lower().endswith(".png") else None
    fig.savefig(path, dpi=100, metadata=metadata)
    plt.close(fig)


def plot_split(stats: SplitStats, train_freq: dict[int, int], test_freq: dict[int, int], path) -> None:
    """Per-idiom sentence counts in training and test, above the Table-2 style totals."""
    fig, (ax_top, ax_bottom) = plt.subplots(2, 1, figsize=(8, 6), gridspec_kw={"height_ratios": [3, 1]})
    ids = sorted(set(train_freq) | set(test_freq))
    xs = range(len(ids))
    ax_top.bar(xs, [train_freq.get(i, 0) for i in ids], label="training", color="0.55")
    ax_top.bar(xs, [test_freq.get(i, 0) for i in ids], bottom=[train_freq.get(i, 0) for i in ids],
               label="test", color="tab:red")
    ax_top.set_xlabel("idiom (sorted by id)")
    ax_top.set_ylabel("sentence pairs")
    ax_top.legend(frameon=False)
    if len(ids) <= 30:
        ax_top.set_xticks(list(xs))
        ax_top.set_xticklabels([str(i) for i in ids], fontsize=7)

    ax_bottom.axis("off")
    table = ax_bottom.table(cellText=[[label, f"{value:,}"] for label, value in stats.rows()],
                            loc="center", cellLoc="left")
    table.scale(1, 1.2)
    _finish(fig, path)


def plot_scores(report: MetricReport, path) -> None:
    """Histograms of per-sentence unigram precision and word-level idiom accuracy."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    precision = [s.precision for s in report.per_sentence]
    wiacc = [float(s.wiacc.value) for s in report.per_sentence]
    axes[0].hist(precision, bins=10, range=(0.0, 1.0), color="tab:blue")
    axes[0].axvline(report.mean_unigram_precision, color="k", ls="--", lw=1)
    axes[0].set_xlabel("unigram precision")
    axes[0].set_ylabel("test sentences")
    lo = min([0.0] + wiacc)
    axes[1].hist(wiacc, bins=10, range=(lo, 1.0), color="tab:green")
    axes[1].axvline(report.mean_wiacc, color="k", ls="--", lw=1)
    axes[1].set_xlabel("word-level idiom accuracy")
    fig.suptitle(f"BLEU {100 * report.corpus_bleu:.1f}")
    _finish(fig, path)
