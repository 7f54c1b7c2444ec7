"""
Output - Stable JSON/CSV Text and Console Summaries

RULES:
1. JSON: sorted keys, two-space indent, trailing newline
2. CSV: fixed column order, "\\n" line endings, empty cell for missing values
3. Same data -> same bytes, so repeated runs can be diffed

Format of a trial summary:
🔬 BELL trials (n=16, 10000 trials)
   Consumed: 6.1234 ± 0.0123
   Distilled: 9.8766 ± 0.0123
   Identification rate: 0.6123
   ...
"""

import csv
import io
import json
import sys
from pathlib import Path


def to_json_text(data):
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def to_csv_text(columns, rows):
    """
    Render rows as CSV.

    Args:
        columns: Column names, in output order
        rows: dicts keyed by column, or lists already in column order

    Returns:
        str
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = [row.get(column) for column in columns] if isinstance(row, dict) else row
        writer.writerow(["" if value is None else value for value in values])
    return buffer.getvalue()


def write_output(text, path=None):
    """Write text to path, or to stdout when path is None or "-"."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def write_json(data, path=None):
    write_output(to_json_text(data), path)


def write_csv(columns, rows, path=None):
    write_output(to_csv_text(columns, rows), path)


def format_summary(report):
    """
    Human-readable summary of a StatsReport.

    Example:
        >>> print(format_summary(report))
        🔬 ORTHOGONAL trials (n=16, 17 trials)
           Consumed: 4.2353 ± 0.1059
           ...
    """
    config = report.config
    lines = [f"🔬 {config['regime'].upper()} trials (n={config['n']}, {report.trials} trials)"]
    if config["regime"] == "nonorthogonal":
        lines.append(f"   Overlap: {config['overlap']}")
    lines.append(f"   Consumed: {report.mean_consumed:.4f} ± {report.stderr_consumed:.4f}")
    lines.append(f"   Distilled: {report.mean_distilled:.4f} ± {report.stderr_distilled:.4f}")
    lines.append(f"   Identification rate: {report.identification_rate:.4f}")
    if report.mutation_identification_rate is not None:
        lines.append(f"   Mutation identification rate: {report.mutation_identification_rate:.4f}")
    for status, count in report.status_histogram.items():
        lines.append(f"   {status}: {count}")
    if report.branch_counts:
        branches = ", ".join(f"{branch}={count}" for branch, count in report.branch_counts.items())
        lines.append(f"   Branches: {branches}")

    wrong = report.wrong_change_points + report.wrong_mutations + report.mislabeled_distilled
    lines.append("   ✅ No wrong reports" if wrong == 0 else f"   ❌ {wrong} wrong reports")
    return "\n".join(lines)
