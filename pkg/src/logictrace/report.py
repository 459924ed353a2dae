"""Report emission: JSON, Markdown, per-instance CSV, and rendered figures.

The JSON file reloads losslessly through ``load_report``. Figures (a
confusion-matrix heatmap per three-way run and an error-taxonomy bar chart
per verified run) are written next to the delimited output.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .evaluate import LABELS, EvalReport
from .verifier import ERROR_CLASSES

ALL_FORMATS = ("json", "md", "csv", "figures")


def emit_report(reports: EvalReport | list[EvalReport], out_dir: str | Path,
                formats: tuple[str, ...] = ALL_FORMATS) -> list[Path]:
    """Write a run's reports to ``out_dir``; returns the created paths."""
    if isinstance(reports, EvalReport):
        reports = [reports]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if "json" in formats:
        written.append(_write_json(reports, out / "eval_report.json"))
    if "md" in formats:
        written.append(_write_markdown(reports, out / "eval_report.md"))
    if "csv" in formats:
        written.append(_write_csv(reports, out / "per_instance.csv"))
    if "figures" in formats:
        written.extend(_write_figures(reports, out))
    return written


def load_report(path: str | Path) -> list[EvalReport]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [EvalReport.from_dict(entry) for entry in data["reports"]]


def _write_json(reports: list[EvalReport], path: Path) -> Path:
    payload = {"reports": [r.to_dict() for r in reports]}
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def _confusion_table(report: EvalReport) -> list[str]:
    lines = ["| gold \\ predicted | True | False | Uncertain | Unknown |",
             "|---|---:|---:|---:|---:|"]
    for i, label in enumerate(LABELS):
        row = report.confusion[i]
        spill = report.unknown_spill[i]
        lines.append(f"| {label} | {row[0]} | {row[1]} | {row[2]} | {spill} |")
    return lines


def _write_markdown(reports: list[EvalReport], path: Path) -> Path:
    lines = ["# Evaluation report", ""]
    lines.append("| variant | dataset | instances | accuracy | partial |")
    lines.append("|---|---|---:|---:|---|")
    for report in reports:
        lines.append(
            f"| {report.variant} | {report.dataset} | {report.instance_count} "
            f"| {report.accuracy:.3f} | {'yes' if report.partial else 'no'} |"
        )
    for report in reports:
        if report.confusion is not None:
            lines.extend(["", f"## Confusion matrix ({report.variant})", ""])
            lines.extend(_confusion_table(report))
            lines.append("")
            recalls = " ".join(f"{k}={v:.3f}" for k, v in (report.recall or {}).items())
            lines.append(f"Recall per class: {recalls}")
    if any(any(r.error_histogram.values()) or r.variant.startswith("symbolic")
           for r in reports):
        lines.extend(["", "## Error taxonomy", ""])
        header = " | ".join(ERROR_CLASSES)
        lines.append(f"| variant | {header} |")
        lines.append("|---|" + "---:|" * len(ERROR_CLASSES))
        for report in reports:
            counts = " | ".join(str(report.error_histogram.get(c, 0)) for c in ERROR_CLASSES)
            lines.append(f"| {report.variant} | {counts} |")
    lines.append("")
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def _write_csv(reports: list[EvalReport], path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["variant", "id", "gold", "extracted_answer", "correct", "prompt_hash",
             "error_classes"]
        )
        for report in reports:
            for result in report.per_instance:
                classes = ""
                if result.verification is not None:
                    classes = ";".join(
                        f"{k}={v}" for k, v in sorted(result.verification.error_classes.items())
                    )
                writer.writerow(
                    [report.variant, result.id, result.gold, result.extracted_answer,
                     int(result.correct), result.prompt_hash, classes]
                )
    return path


def _write_figures(reports: list[EvalReport], out: Path) -> list[Path]:
    written = []
    for report in reports:
        if report.confusion is not None:
            written.append(_confusion_figure(report, out / f"confusion_{report.variant}.png"))
        if any(r.verification is not None for r in report.per_instance):
            written.append(
                taxonomy_figure(
                    report.error_histogram,
                    f"Error taxonomy: {report.variant} on {report.dataset}",
                    out / f"errors_{report.variant}.png",
                )
            )
    return written


def _confusion_figure(report: EvalReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    ax.imshow(report.confusion, cmap="Blues")
    ax.set_xticks(range(3), LABELS)
    ax.set_yticks(range(3), LABELS)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    ax.set_title(f"{report.variant} on {report.dataset} (acc {report.accuracy:.3f})")
    for i in range(3):
        for j in range(3):
            ax.text(j, i, str(report.confusion[i][j]), ha="center", va="center")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def taxonomy_figure(histogram: dict, title: str, path: str | Path) -> Path:
    """Render an error-class bar chart; shared by the run and verify paths."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.2, 3.2))
    counts = [histogram.get(c, 0) for c in ERROR_CLASSES]
    ax.bar(range(len(ERROR_CLASSES)), counts, color="#7461ab")
    ax.set_xticks(range(len(ERROR_CLASSES)), ERROR_CLASSES, rotation=20, ha="right")
    ax.set_ylabel("count")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
