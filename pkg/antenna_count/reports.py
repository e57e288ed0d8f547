"""
Result Serialization
--------------------
CDF tables as CSV, run summaries as JSON, and plain-text reports in the
dotted ``name....value`` layout.
Project: LoS Massive MIMO Antenna Count
"""

import json
import os
import subprocess
from datetime import datetime

import numpy as np
import pandas as pd

from . import __version__

CSV_FLOAT_FORMAT = "%.10g"
CDF_COLUMNS = ("sinr_db", "cum_prob", "link", "scenario")
SUMMARY_PERCENTILES = {"p05": 0.05, "p50": 0.50, "p95": 0.95}


def describe_version():
    """`git describe` of the source tree, or v<package version> outside a checkout."""
    try:
        result = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=os.path.dirname(os.path.abspath(__file__)),
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
        described = result.stdout.strip()
        if described:
            return described
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def cdf_frame(summaries, scenario=None):
    """
    One row per sorted sample per link.

    Parameters
    ----------
    summaries : iterable of CdfSummary (or dict of them)
    scenario : str, optional
        Overrides each summary's own label.
    """
    if isinstance(summaries, dict):
        summaries = summaries.values()
    frames = [
        pd.DataFrame({
            "sinr_db": cdf.sorted_samples,
            "cum_prob": cdf.cum_prob,
            "link": cdf.link,
            "scenario": scenario if scenario is not None else cdf.label,
        })
        for cdf in summaries
    ]
    return pd.concat(frames, ignore_index=True)


def write_table_csv(frame, path):
    """Write with a fixed float format and newline; repeated runs are byte-identical."""
    _ensure_parent(path)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def write_cdf_csv(frame, path):
    return write_table_csv(frame[list(CDF_COLUMNS)], path)


def link_statistics(cdf):
    if cdf.n_trials < 2:
        value = float(cdf.sorted_samples[0])
        stats = {name: value for name in SUMMARY_PERCENTILES}
        stats["spectral_efficiency_p05"] = float(np.log2(1 + 10 ** (value / 10)))
    else:
        stats = {name: cdf.percentile(q) for name, q in SUMMARY_PERCENTILES.items()}
        stats["spectral_efficiency_p05"] = cdf.spectral_efficiency(0.05)
    stats["n_trials"] = cdf.n_trials
    stats["n_degenerate_redraws"] = cdf.n_degenerate_redraws
    return stats


def summary_dict(summaries, cfg, seed, command, extra=None):
    """JSON-ready run summary embedding the fully resolved config."""
    if isinstance(summaries, dict):
        summaries = list(summaries.values())
    summary = {
        "command": command,
        "scenario": cfg.scenario_label,
        "seed": seed,
        "version": describe_version(),
        "config": cfg.to_dict(),
        "links": {cdf.link: link_statistics(cdf) for cdf in summaries},
    }
    if extra:
        summary.update(extra)
    return summary


def write_json(obj, path):
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def format_rows(rows, width=25):
    """Dotted ``name....value`` lines."""
    lines = []
    for name, value in rows.items():
        if isinstance(value, float):
            value = f"{value:>12.2f}"
        else:
            value = f"{value!s:>12}"
        lines.append(f"  {name:.<{width}} {value}")
    return lines


def write_text_report(title, sections, path):
    """
    Save a plain-text report.

    Parameters
    ----------
    title : str
    sections : dict
        Section heading -> {row name: value}.
    path : str
    """
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write("=" * 70 + "\n")
        f.write(f"{title.upper():^70}\n")
        f.write(f"{'LoS Massive MIMO Antenna Count':^70}\n")
        f.write("=" * 70 + "\n\n")
        f.write(f"Report Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
        for number, (heading, rows) in enumerate(sections.items(), start=1):
            f.write(f"\n{number}. {heading.upper()}\n")
            f.write("-" * 70 + "\n")
            for line in format_rows(rows):
                f.write(line + "\n")
        f.write("\n" + "=" * 70 + "\n")
    return path


def report_path(csv_path, suffix):
    stem, _ = os.path.splitext(csv_path)
    return f"{stem}{suffix}"
