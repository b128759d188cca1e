"""Report rendering: delimited tables and matplotlib figures on disk.

The evaluation and benchmark commands can mirror their JSON output into a
report directory holding a CSV table plus a rendered PNG figure. Everything
is written to files (headless Agg backend); nothing opens a window.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .bench import BenchResult
from .evaluate import AccuracyReport

__all__ = ["write_eval_report", "write_bench_report"]


def _figure_modules():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def write_eval_report(report: AccuracyReport, out_dir) -> list[Path]:
    """Write per-utterance accuracies as CSV and a figure; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "accuracy_per_utterance.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "accuracy", "n_frames"])
        for uid, acc, n_frames in report.per_utterance:
            writer.writerow([uid, f"{acc:.6f}", n_frames])

    plt = _figure_modules()
    fig, ax = plt.subplots(figsize=(8, 4))
    accs = [acc for _, acc, _ in report.per_utterance]
    if len(accs) <= 64:
        ax.bar(range(len(accs)), accs, color="#4878b0")
        ax.set_xlabel("utterance")
    else:
        ax.hist(accs, bins=20, color="#4878b0")
        ax.set_xlabel("frame accuracy")
        ax.set_ylabel("utterances")
    ax.axhline(report.micro_frame_accuracy, color="#d65f5f", linestyle="--",
               label=f"micro {100 * report.micro_frame_accuracy:.2f}%")
    ax.axhline(report.macro_utterance_accuracy, color="#6acc65", linestyle=":",
               label=f"macro {100 * report.macro_utterance_accuracy:.2f}%")
    ax.set_ylim(0.0, 1.05)
    if len(accs) <= 64:
        ax.set_ylabel("frame accuracy")
    ax.set_title(f"Alignment accuracy over {report.n_utterances} utterances")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig_path = out_dir / "accuracy_report.png"
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return [csv_path, fig_path]


def write_bench_report(results: list[BenchResult], out_dir) -> list[Path]:
    """Write per-method timings as CSV and a comparison figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "bench_timings.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "total_seconds", "median_pass_seconds", "pairs",
             "timed_runs", "per_pair_ms"]
        )
        for res in results:
            writer.writerow(
                [res.method, f"{res.total_seconds:.6f}", f"{res.median_pass_seconds:.6f}",
                 res.pairs, res.timed_runs, f"{res.per_pair_ms:.4f}"]
            )

    plt = _figure_modules()
    fig, ax = plt.subplots(figsize=(6, 4))
    methods = [res.method for res in results]
    medians = [res.median_pass_seconds for res in results]
    bars = ax.bar(methods, medians, color=["#4878b0", "#ee854a"][: len(results)])
    ax.bar_label(bars, fmt="%.3f s")
    ax.set_ylabel("median pass time (s)")
    title = "Alignment timing"
    by_method = {res.method: res for res in results}
    if "dtw" in by_method and "ot" in by_method and by_method["dtw"].total_seconds > 0:
        ratio = by_method["ot"].total_seconds / by_method["dtw"].total_seconds
        title += f" (dtw {ratio:.1f}x faster)"
    ax.set_title(title)
    fig.tight_layout()
    fig_path = out_dir / "bench_report.png"
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return [csv_path, fig_path]
