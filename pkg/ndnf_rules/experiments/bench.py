"""
Disentanglement runtime benchmark.

Random nodes of increasing fan-in are disentangled under a time budget; each
trial records its elapsed time and split count. Trials that hit the budget are
kept as censored observations.
"""

import logging
import time
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..config.settings import DEFAULT_BUDGET_SECS, LATTICE_WEIGHT
from ..discretise.disentangle import disentangle_node
from ..discretise.splits import Polarity
from ..errors import BudgetExceededError

logger = logging.getLogger(__name__)


def random_node(fan_in: int, rng: np.random.Generator) -> np.ndarray:
    """Trained-like conjunctive weights: every input used, magnitudes uniform in (0, 6]."""
    magnitudes = rng.uniform(0.0, LATTICE_WEIGHT, fan_in)
    magnitudes[magnitudes == 0.0] = LATTICE_WEIGHT
    return np.where(rng.random(fan_in) < 0.5, -1.0, 1.0) * magnitudes


def bench_disentangle(fan_in_min: int = 2, fan_in_max: int = 16, trials: int = 5,
                      budget_secs: float = DEFAULT_BUDGET_SECS, seed: int = 0,
                      progress: bool = False) -> pd.DataFrame:
    """
    Time positive-polarity disentanglement over a range of fan-ins.

    Args:
        fan_in_min: Smallest fan-in
        fan_in_max: Largest fan-in (inclusive)
        trials: Random nodes per fan-in
        budget_secs: Search budget per node
        seed: Seed for the random nodes
        progress: Show a tqdm progress bar

    Returns:
        DataFrame with columns fan_in, trial, elapsed_s, splits, censored
        (splits is the partial count for censored trials)
    """
    if fan_in_min < 1 or fan_in_max < fan_in_min:
        raise ValueError(f"invalid fan-in range {fan_in_min}..{fan_in_max}")
    rng = np.random.default_rng(seed)
    rows = []
    grid = [(f, t) for f in range(fan_in_min, fan_in_max + 1) for t in range(trials)]
    for fan_in, trial in tqdm(grid, desc='Benchmark', disable=not progress):
        weights = random_node(fan_in, rng)
        started = time.monotonic()
        censored = False
        try:
            splits = len(disentangle_node(weights, Polarity.POSITIVE, budget_secs=budget_secs, node=trial))
        except BudgetExceededError as e:
            censored = True
            splits = len(e.partial or [])
            logger.warning(f"fan_in={fan_in} trial={trial} hit the {budget_secs}s budget")
        elapsed = time.monotonic() - started
        rows.append({'fan_in': fan_in, 'trial': trial, 'elapsed_s': elapsed, 'splits': splits,
                     'censored': censored})
        logger.debug(f"fan_in={fan_in} trial={trial} elapsed={elapsed:.4f}s splits={splits}")
    return pd.DataFrame(rows, columns=['fan_in', 'trial', 'elapsed_s', 'splits', 'censored'])


def bench_summary(frame: pd.DataFrame) -> pd.DataFrame:
    """Median elapsed time and split count per fan-in, plus the censored-trial count."""
    grouped = frame.groupby('fan_in', sort=True)
    return pd.DataFrame({
        'median_elapsed_s': grouped['elapsed_s'].median(),
        'median_splits': grouped['splits'].median(),
        'censored': grouped['censored'].sum().astype(int),
    }).reset_index()


def write_bench(frame: pd.DataFrame, path: str, summary_path: Optional[str] = None) -> None:
    """
    Write the trial table as CSV and, optionally, the per-fan-in summary as
    whitespace-separated columns with a ``#`` header line (plots directly with gnuplot).
    """
    frame.to_csv(path, index=False, float_format='%.6f', lineterminator='\n')
    if summary_path:
        summary = bench_summary(frame)
        with open(summary_path, 'w', encoding='utf-8') as f:
            f.write('# ' + ' '.join(summary.columns) + '\n')
            summary.to_csv(f, sep=' ', header=False, index=False, float_format='%.6f', lineterminator='\n')
    logger.info(f"Benchmark table written to {path}")
