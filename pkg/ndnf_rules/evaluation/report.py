"""
Experiment reports.

Per-seed results are collected into a DataFrame, reduced to mean +/- standard
error per method and written as CSV plus a text rendering. Nothing
time-dependent is written, so reruns with the same seeds are byte-identical.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from ..config.templates import REPORT_FOOTER, REPORT_HEADER, REPORT_SECTIONS
from ..utils.helpers import ensure_dir, save_text

logger = logging.getLogger(__name__)

METHODS = ('train', 'thresh', 'disent')
COMPACTNESS_COLUMNS = ('max_rule_length', 'avg_rule_length', 'num_rules')
FLOAT_FORMAT = '%.6f'


@dataclass
class ReportBundle:
    """
    Results of one experiment.

    Attributes:
        name: Experiment name
        per_seed: One row per seed (failed seeds keep their status and NaN metrics)
        summary: One row per method with mean/ste columns
        text: Human-readable rendering
        paths: Written files by kind
    """

    name: str
    per_seed: pd.DataFrame
    summary: pd.DataFrame
    text: str = ''
    paths: Dict[str, str] = field(default_factory=dict)


def standard_error(values: Sequence[float]) -> float:
    """Sample standard deviation over sqrt(n); nan for fewer than two values."""
    values = np.asarray([v for v in values if not pd.isna(v)], dtype=float)
    if values.size < 2:
        return float('nan')
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def per_seed_frame(records: List[Dict[str, Any]]) -> pd.DataFrame:
    """
    Per-seed table with drop columns added.

    Args:
        records: One dict per seed with at least 'seed' and 'status'

    Returns:
        DataFrame sorted by seed
    """
    frame = pd.DataFrame(records)
    for method in METHODS:
        if f"f1_{method}" not in frame:
            frame[f"f1_{method}"] = np.nan
    frame['drop_thresh'] = frame['f1_train'] - frame['f1_thresh']
    frame['drop_disent'] = frame['f1_train'] - frame['f1_disent']
    return frame.sort_values('seed', kind='stable').reset_index(drop=True)


def summarise(per_seed: pd.DataFrame) -> pd.DataFrame:
    """
    Reduce per-seed results to one row per method.

    Columns: method, n, f1_mean, f1_ste, drop_mean, drop_ste and mean/ste for each
    compactness metric (NaN where a method has no value, e.g. compactness of the
    undiscretised model).
    """
    ok = per_seed[per_seed['status'] == 'ok']
    rows = []
    for method in METHODS:
        f1 = ok[f"f1_{method}"].dropna()
        row: Dict[str, Any] = {'method': method, 'n': int(f1.size),
                               'f1_mean': float(f1.mean()) if f1.size else float('nan'),
                               'f1_ste': standard_error(f1)}
        drop_column = f"drop_{method}"
        drops = ok[drop_column].dropna() if drop_column in ok else pd.Series(dtype=float)
        row['drop_mean'] = float(drops.mean()) if drops.size else float('nan')
        row['drop_ste'] = standard_error(drops)
        for metric in COMPACTNESS_COLUMNS:
            column = f"{method}_{metric}"
            values = ok[column].dropna() if column in ok else pd.Series(dtype=float)
            row[f"{metric}_mean"] = float(values.mean()) if values.size else float('nan')
            row[f"{metric}_ste"] = standard_error(values)
        rows.append(row)
    return pd.DataFrame(rows)


def _pm(mean: float, ste: float) -> str:
    if pd.isna(mean):
        return '-'
    if pd.isna(ste):
        return f"{mean:.3f} +/- nan"
    return f"{mean:.3f} +/- {ste:.3f}"


def render_report(bundle: ReportBundle, meta: Dict[str, Any]) -> str:
    """
    Text rendering of a report.

    Args:
        bundle: Report tables
        meta: Values for the header and footer templates (dataset, task,
            eval_split, metric)

    Returns:
        Report text ending in a newline
    """
    failed = int((bundle.per_seed['status'] != 'ok').sum())
    lines = [REPORT_HEADER.format(name=bundle.name, seeds=len(bundle.per_seed), failed=failed, **meta), '']
    summary = bundle.summary.set_index('method')

    lines.append(REPORT_SECTIONS['f1'])
    for method in METHODS:
        lines.append(f"  f1_{method:<8} {_pm(summary.at[method, 'f1_mean'], summary.at[method, 'f1_ste'])}")
    lines.append('')

    lines.append(REPORT_SECTIONS['drop'])
    for method in METHODS[1:]:
        lines.append(f"  drop_{method:<6} {_pm(summary.at[method, 'drop_mean'], summary.at[method, 'drop_ste'])}")
    lines.append('')

    lines.append(REPORT_SECTIONS['compactness'])
    lines.append(f"  {'method':<8} " + ' '.join(f"{m:>22}" for m in COMPACTNESS_COLUMNS))
    for method in METHODS[1:]:
        cells = [_pm(summary.at[method, f"{m}_mean"], summary.at[method, f"{m}_ste"]) for m in COMPACTNESS_COLUMNS]
        lines.append(f"  {method:<8} " + ' '.join(f"{c:>22}" for c in cells))
    lines.append('')

    failures = bundle.per_seed[bundle.per_seed['status'] != 'ok']
    if len(failures):
        lines.append('Failed seeds:')
        for _, row in failures.iterrows():
            lines.append(f"  seed {row['seed']}: {row['status']}")
        lines.append('')

    lines.append(REPORT_FOOTER.format(**meta))
    return '\n'.join(lines) + '\n'


def write_report(bundle: ReportBundle, out_dir: str) -> Dict[str, str]:
    """
    Write per_seed.csv, summary.csv and report.txt.

    Args:
        bundle: Report to write
        out_dir: Output directory

    Returns:
        Paths by kind ('per_seed', 'summary', 'text')
    """
    ensure_dir(out_dir)
    paths = {
        'per_seed': os.path.join(out_dir, 'per_seed.csv'),
        'summary': os.path.join(out_dir, 'summary.csv'),
        'text': os.path.join(out_dir, 'report.txt'),
    }
    try:
        bundle.per_seed.to_csv(paths['per_seed'], index=False, float_format=FLOAT_FORMAT, na_rep='nan',
                               lineterminator='\n')
        bundle.summary.to_csv(paths['summary'], index=False, float_format=FLOAT_FORMAT, na_rep='nan',
                              lineterminator='\n')
        save_text(bundle.text, paths['text'])
    except OSError as e:
        logger.error(f"Error writing report to {out_dir}: {e}")
        raise
    bundle.paths.update(paths)
    logger.info(f"Report written to {out_dir}")
    return paths
