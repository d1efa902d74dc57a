"""Writers for benchmark outputs: CSV tables, a JSON summary, and figures.

CSV and JSON files are byte-identical across reruns of the same config and
seed: floats are written with shortest round-trip formatting, keys are
sorted, and wall-clock timings go to a separate plain-text file instead.
"""

import csv
import json
from pathlib import Path

from . import plots


def _fmt(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_timings(path: Path, runtimes: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for method, seconds in runtimes.items():
            fh.write(f"{method}: {seconds:.3f} s\n")


def write_bench_outputs(report, out_dir, chance=None) -> list[Path]:
    """Write one benchmark report: accuracy/significance CSVs, JSON, figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    table = out_dir / f"{report.kind}.csv"
    _write_csv(table,
               ["method", "classifier", "mean_accuracy", "std_accuracy",
                "mean_precision", "std_precision", "mean_recall", "std_recall"],
               [[c.method, c.classifier, c.mean_accuracy, c.std_accuracy,
                 c.mean_precision, c.std_precision, c.mean_recall, c.std_recall]
                for c in report.cells])
    written.append(table)

    if report.comparisons:
        sig = out_dir / "significance.csv"
        _write_csv(sig, ["method", "classifier", "baseline", "t", "p"],
                   [[c.method, c.classifier, c.baseline, c.t, c.p]
                    for c in report.comparisons])
        written.append(sig)

    summary = out_dir / "summary.json"
    _write_json(summary, report.to_dict(include_runtime=False))
    written.append(summary)

    _write_timings(out_dir / "timings.txt", report.runtime_seconds)

    figure = out_dir / f"{report.kind}.png"
    plots.plot_accuracy_bars(report, figure, chance=chance)
    written.append(figure)
    return written


def write_sweep_outputs(points, config_dict, out_dir, classifier="lda") -> list[Path]:
    """Write the k-sensitivity sweep: CSV curve, JSON summary, figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    table = out_dir / "sweep_k.csv"
    _write_csv(table, ["k", "mean_accuracy", "std_accuracy", "error"],
               [[p.k, p.mean_accuracy, p.std_accuracy, p.error or ""] for p in points])
    written.append(table)

    summary = out_dir / "summary.json"
    _write_json(summary, {
        "kind": "sweep_k",
        "classifier": classifier,
        "config": config_dict,
        "points": [
            {"k": p.k, "mean_accuracy": p.mean_accuracy, "std_accuracy": p.std_accuracy,
             "per_split_accuracy": p.per_split_accuracy, "error": p.error}
            for p in points
        ],
    })
    written.append(summary)

    figure = out_dir / "sweep_k.png"
    plots.plot_sensitivity_curve(points, figure, classifier=classifier)
    written.append(figure)
    return written
