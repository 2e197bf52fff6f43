"""
Experiment orchestration.

For every seed: train, score the trained model, extract a program by
thresholding and one by disentanglement, score both programs and record their
compactness. Seeds run as independent jobs; a failing seed is logged and
recorded, and the run continues.
"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional

import numpy as np

from ..config.schema import DatasetConfig, ExperimentConfig
from ..config.settings import worker_count
from ..config.templates import RULE_FILE_HEADER
from ..data.boolean_network import generate_boolean_network, parse_network_spec, random_boolean_network
from ..data.checkpoint import checkpoint_from_run, save_checkpoint
from ..data.loader import Dataset, assign_splits, load_csv, load_monk
from ..discretise.disentangle import disentangle_model
from ..discretise.threshold import ThresholdScope, apply_threshold, sweep_tau, zero_tau
from ..evaluation.metrics import evaluate
from ..evaluation.report import ReportBundle, per_seed_frame, render_report, summarise, write_report
from ..logic.probabilistic import emit_mt_program
from ..logic.program import LogicProgram, compactness, emit_asp
from ..logic.translate import translate
from ..training.model import NeuralDnfModel, TaskKind
from ..training.trainer import build_model, start_run, train
from ..utils.helpers import ensure_dir, format_duration, save_text

logger = logging.getLogger(__name__)


def load_dataset(config: DatasetConfig) -> Dataset:
    """
    Load or generate the dataset an experiment names.

    Random train/val/test tags are assigned (with the network seed) when a
    validation or test fraction is configured and the data has no split column.
    """
    if config.dataset == 'csv':
        dataset = load_csv(config.path, config.label_columns, task=TaskKind(config.task),
                           categorical_columns=config.categorical_columns or None,
                           real_columns=config.real_columns, boolean_columns=config.boolean_columns,
                           split_column=config.split_column, predicate_invention=config.predicate_invention)
    elif config.dataset == 'monk':
        dataset = load_monk(config.path)
    elif config.path:
        with open(config.path, 'r', encoding='utf-8') as f:
            spec = parse_network_spec(f.read(), n_genes=config.genes)
        dataset = generate_boolean_network(spec, seed=config.network_seed, samples=config.samples)
    else:
        spec = random_boolean_network(config.genes, seed=config.network_seed)
        dataset = generate_boolean_network(spec, seed=config.network_seed, samples=config.samples)

    if (config.val_fraction or config.test_fraction) and not config.split_column:
        dataset = assign_splits(dataset, config.network_seed, config.val_fraction, config.test_fraction)
    return dataset


def extract_program(model: NeuralDnfModel, dataset: Dataset) -> LogicProgram:
    """Program of a discretised model; annotated rules come from the patterns seen in ``dataset``."""
    if model.task is TaskKind.MULTICLASS:
        return emit_mt_program(model, dataset)
    return translate(model)


def _rule_file(program: LogicProgram, method: str, dataset: Dataset, seed: int) -> str:
    report = compactness(program, conj_only=dataset.task is TaskKind.MULTICLASS)
    header = RULE_FILE_HEADER.format(method=method, dataset=dataset.name, seed=seed,
                                     num_rules=report.num_rules, max_rule_length=report.max_rule_length,
                                     avg_rule_length=report.avg_rule_length)
    return f"{header}\n{emit_asp(program)}"


def _compactness_fields(prefix: str, program: LogicProgram, task: TaskKind) -> Dict[str, Any]:
    report = compactness(program, conj_only=task is TaskKind.MULTICLASS)
    return {f"{prefix}_max_rule_length": report.max_rule_length,
            f"{prefix}_avg_rule_length": report.avg_rule_length,
            f"{prefix}_num_rules": report.num_rules}


def run_seed(config: ExperimentConfig, dataset: Dataset, seed: int, out_dir: str,
             workers: Optional[int] = None) -> Dict[str, Any]:
    """
    Train and discretise one model.

    Args:
        config: Experiment configuration
        dataset: Full dataset (split tags select train/selection/evaluation rows)
        seed: Seed for initialisation and shuffling
        out_dir: Directory for this seed's artifacts
        workers: Worker threads for tau sweeps and per-node disentanglement

    Returns:
        Per-seed record (status 'ok')
    """
    started = time.time()
    seed_dir = os.path.join(out_dir, f"seed_{seed}")
    ensure_dir(seed_dir)

    train_cfg = config.train.model_copy(update={'seed': seed})
    train_ds = dataset.subset('train')
    select_ds = dataset.subset('val') if dataset.has_split('val') else train_ds
    eval_ds = dataset.subset(config.eval_split)
    if len(train_ds) == 0 or len(eval_ds) == 0:
        raise ValueError(f"empty train or '{config.eval_split}' split")

    rng = np.random.default_rng(seed)
    run = start_run(build_model(train_ds, train_cfg, rng), train_cfg, rng)
    history = train(run, train_ds, progress=False)
    history.to_csv(os.path.join(seed_dir, 'history.csv'), index=False, float_format='%.6f', lineterminator='\n')
    save_checkpoint(checkpoint_from_run(run, metadata={'dataset': dataset.name, 'features': dataset.feature_names}),
                    os.path.join(seed_dir, 'checkpoint.json'))
    model = run.model
    f1_train = evaluate(model, eval_ds, mode='neural').macro_f1

    if config.thresh_tau == 'sweep':
        thresh_choice = sweep_tau(model, select_ds, ThresholdScope.MODEL, config.selection_metric, workers=workers)
    else:
        thresh_choice = zero_tau(model, select_ds, ThresholdScope.MODEL, config.selection_metric)
    thresh_program = extract_program(apply_threshold(model, thresh_choice.tau, ThresholdScope.MODEL), train_ds)
    f1_thresh = evaluate(thresh_program, eval_ds).macro_f1

    disent_model, provenance, disj_choice = disentangle_model(
        model, budget_secs=config.budget_secs, disj_tau=config.disj_tau, eval_dataset=select_ds,
        metric=config.selection_metric, verify=config.verify, fan_in_cap=config.fan_in_cap, workers=workers)
    disent_program = extract_program(disent_model, train_ds)
    f1_disent = evaluate(disent_program, eval_ds).macro_f1

    save_text(_rule_file(thresh_program, 'thresholding', dataset, seed), os.path.join(seed_dir, 'thresh.lp'))
    save_text(_rule_file(disent_program, 'disentanglement', dataset, seed), os.path.join(seed_dir, 'disent.lp'))
    save_text(''.join(f"{record.to_line()}\n" for record in provenance), os.path.join(seed_dir, 'provenance.log'))

    record = {
        'seed': seed,
        'status': 'ok',
        'f1_train': f1_train,
        'f1_thresh': f1_thresh,
        'f1_disent': f1_disent,
        'thresh_tau': thresh_choice.tau,
        'disj_tau': disj_choice.tau if disj_choice is not None else float('nan'),
        'disent_fallbacks': sum(1 for r in provenance if r.verdict == 'fallback'),
    }
    record.update(_compactness_fields('thresh', thresh_program, dataset.task))
    record.update(_compactness_fields('disent', disent_program, dataset.task))
    logger.info(f"Seed {seed}: f1_train={f1_train:.4f} f1_thresh={f1_thresh:.4f} f1_disent={f1_disent:.4f} "
                f"({format_duration(time.time() - started)})")
    return record


def _seed_job(args) -> Dict[str, Any]:
    config, dataset, seed, out_dir, workers = args
    try:
        return run_seed(config, dataset, seed, out_dir, workers)
    except Exception as e:
        logger.error(f"Seed {seed} failed: {e}")
        return {'seed': seed, 'status': f"failed: {type(e).__name__}: {e}"}


def run_experiment(config: ExperimentConfig, out_dir: str, workers: Optional[int] = None,
                   dataset: Optional[Dataset] = None) -> ReportBundle:
    """
    Run every seed of an experiment and write the report.

    Args:
        config: Experiment configuration
        out_dir: Output directory (one sub-directory per seed plus the report files)
        workers: Worker cap for seed jobs (capped by NDNF_THREADS)
        dataset: Preloaded dataset (loaded from config.data when None)

    Returns:
        ReportBundle with per-seed and summary tables
    """
    dataset = dataset if dataset is not None else load_dataset(config.data)
    ensure_dir(out_dir)
    if dataset.ground_truth:
        save_text(dataset.ground_truth, os.path.join(out_dir, 'ground_truth.lp'))
    logger.info(f"Running experiment {config.name} on {dataset.name} with seeds {config.seeds}")

    jobs = [(config, dataset, seed, out_dir, workers) for seed in config.seeds]
    with ThreadPoolExecutor(max_workers=min(worker_count(workers), len(jobs))) as pool:
        records: List[Dict[str, Any]] = list(pool.map(_seed_job, jobs))

    per_seed = per_seed_frame(records)
    bundle = ReportBundle(name=config.name, per_seed=per_seed, summary=summarise(per_seed))
    bundle.text = render_report(bundle, {'dataset': dataset.name, 'task': dataset.task.value,
                                         'eval_split': config.eval_split, 'metric': config.selection_metric})
    write_report(bundle, out_dir)
    logger.info(f"Experiment {config.name} finished: "
                f"{int((per_seed['status'] == 'ok').sum())}/{len(per_seed)} seeds succeeded")
    return bundle
