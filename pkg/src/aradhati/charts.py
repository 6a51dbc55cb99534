"""Bar charts for evaluation and error reports.

Every image is written next to a JSON file holding exactly the plotted
values; tests compare those, never pixels.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

METRICS = ("accuracy", "precision", "recall", "f1")


def _save(fig, data, stem: Path):
    stem.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(stem.with_suffix(".png"), dpi=100, metadata={"Software": None})
    plt.close(fig)
    stem.with_suffix(".json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return stem.with_suffix(".png"), stem.with_suffix(".json")


def performance_chart(reports, stem, title="Performance by slice"):
    """Grouped bars: one group per slice, one bar per model, one panel per metric."""
    slices = list(dict.fromkeys(r.slice for r in reports))
    models = list(dict.fromkeys(r.model for r in reports))
    lookup = {(r.model, r.slice): r for r in reports}
    data = {"slices": slices, "models": models, "values": {}}
    for metric in METRICS:
        data["values"][metric] = {
            m: [getattr(lookup[(m, s)].metrics, metric) if lookup.get((m, s)) and lookup[(m, s)].metrics else None
                for s in slices]
            for m in models
        }
    fig, axes = plt.subplots(1, len(METRICS), figsize=(4 * len(METRICS), 3.5), sharey=True)
    width = 0.8 / max(len(models), 1)
    for ax, metric in zip(axes, METRICS):
        for j, m in enumerate(models):
            ys = [v if v is not None else 0.0 for v in data["values"][metric][m]]
            ax.bar([i + j * width for i in range(len(slices))], ys, width, label=m)
        ax.set_xticks([i + width * (len(models) - 1) / 2 for i in range(len(slices))])
        ax.set_xticklabels(slices, rotation=20)
        ax.set_title(metric)
        ax.set_ylim(0, 1.05)
    axes[0].legend(fontsize=7)
    fig.suptitle(title)
    fig.tight_layout()
    return _save(fig, data, Path(stem))


def count_chart(counts: dict, stem, title):
    labels = list(counts)
    data = {"labels": labels, "counts": [counts[k] for k in labels]}
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(labels, data["counts"], color="#4c72b0")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, data, Path(stem))
