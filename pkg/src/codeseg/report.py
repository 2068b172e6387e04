"""Report artifacts: JSON, rendered tables, CSV series, and figures."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .labels import GOLD_LABELS, PRED_LABELS

_COLUMNS = ("Model", "Acc.", "Precis.", "Recall", "Macro F1", "Micro F1", "Context")

#: Dropping the Software key keeps PNG bytes stable across library builds.
_PNG_METADATA = {"Software": None}


def _pct(value: float) -> str:
    return f"{100 * value:.2f}"


def render_table(reports: Sequence[dict]) -> str:
    """Fixed-width table of one row per report, paper column order."""
    rows = [
        (
            report["backend"] or "-",
            _pct(report["metrics"]["accuracy"]),
            _pct(report["metrics"]["macro_precision"]),
            _pct(report["metrics"]["macro_recall"]),
            _pct(report["metrics"]["macro_f1"]),
            _pct(report["metrics"]["micro_f1"]),
            "-" if report["context_c"] is None else str(report["context_c"]),
        )
        for report in reports
    ]
    widths = [
        max(len(_COLUMNS[i]), *(len(row[i]) for row in rows)) for i in range(len(_COLUMNS))
    ]
    lines = [
        "  ".join(_COLUMNS[i].ljust(widths[i]) for i in range(len(_COLUMNS))),
        "  ".join("-" * widths[i] for i in range(len(_COLUMNS))),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(_COLUMNS))))
    return "\n".join(lines) + "\n"


def write_json(payload: dict, path: Path) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_per_file_csv(report: dict, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file_id", "line_count", "segment_count_gold", "segment_count_pred"])
        for row in report["per_file"]:
            writer.writerow(
                [row["file_id"], row["line_count"], row["segment_count_gold"],
                 row["segment_count_pred"]]
            )


def plot_confusion(report: dict, path: Path) -> None:
    counts = report["confusion"]
    fig, ax = plt.subplots(figsize=(7.5, 5.5))
    image = ax.imshow(counts, cmap="Blues")
    ax.set_xticks(range(len(PRED_LABELS)))
    ax.set_xticklabels([l.display for l in PRED_LABELS], rotation=45, ha="right")
    ax.set_yticks(range(len(GOLD_LABELS)))
    ax.set_yticklabels([l.display for l in GOLD_LABELS])
    ax.set_xlabel("Predicted")
    ax.set_ylabel("Gold")
    for i, row in enumerate(counts):
        for j, value in enumerate(row):
            if value:
                ax.text(j, i, str(value), ha="center", va="center", fontsize=8)
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_METADATA)
    plt.close(fig)


def write_run_report(
    report: dict, out_dir: Path, stem: str, *, figures: bool = True
) -> dict[str, Path]:
    """Write report.json, the rendered table, per-file CSV, and the
    confusion-matrix figure; returns the paths keyed by artifact kind."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out_dir / f"{stem}.json",
        "table": out_dir / f"{stem}.txt",
        "per_file": out_dir / f"{stem}_per_file.csv",
    }
    write_json(report, paths["json"])
    paths["table"].write_text(render_table([report]), encoding="utf-8")
    write_per_file_csv(report, paths["per_file"])
    if figures:
        paths["confusion"] = out_dir / f"{stem}_confusion.png"
        plot_confusion(report, paths["confusion"])
    return paths


def write_sweep(
    reports: Sequence[dict], out_dir: Path, *, figures: bool = True
) -> dict[str, Path]:
    """Context-sweep series: one CSV row per context size plus a curve figure."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"series": out_dir / "context_series.csv"}
    with paths["series"].open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["context_c", "accuracy", "macro_precision", "macro_recall",
                         "macro_f1", "micro_f1"])
        for report in reports:
            m = report["metrics"]
            writer.writerow(
                [report["context_c"], m["accuracy"], m["macro_precision"],
                 m["macro_recall"], m["macro_f1"], m["micro_f1"]]
            )
    if figures:
        contexts = [report["context_c"] for report in reports]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(contexts, [r["metrics"]["accuracy"] for r in reports],
                marker="o", label="Accuracy")
        ax.plot(contexts, [r["metrics"]["macro_f1"] for r in reports],
                marker="s", label="Macro F1")
        ax.set_xlabel("Context window size c")
        ax.set_ylabel("Score")
        ax.set_xticks(contexts)
        ax.set_ylim(0.0, 1.0)
        ax.legend()
        ax.grid(alpha=0.3)
        fig.tight_layout()
        paths["figure"] = out_dir / "context_accuracy.png"
        fig.savefig(paths["figure"], metadata=_PNG_METADATA)
        plt.close(fig)
    return paths
