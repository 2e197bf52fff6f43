"""
Main entry point for the neural DNF toolkit.

This module wires the `ndnf` subcommands to the training, discretisation,
rule-emission and experiment pipelines.
"""

import os
import sys
import logging
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .config.schema import ExperimentConfig, load_experiment_config
from .config.settings import parse_args
from .core.semisym import NodeKind
from .data.checkpoint import ModelCheckpoint, checkpoint_from_run, load_checkpoint, save_checkpoint
from .data.loader import Dataset
from .discretise.disentangle import disentangle_model
from .discretise.threshold import ThresholdScope, apply_threshold, sweep_tau, zero_tau
from .errors import NdnfError
from .evaluation.metrics import evaluate
from .evaluation.oracle import enumerate_truth_table, render_truth_table
from .experiments.bench import bench_disentangle, bench_summary, write_bench
from .experiments.runner import load_dataset, run_experiment
from .logic.program import compactness, emit_asp, parse_asp
from .logic.probabilistic import emit_mt_program
from .logic.translate import label_heads, translate
from .training.model import TaskKind
from .training.trainer import build_model, start_run, train
from .utils.helpers import ensure_dir, save_text

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(sys.stdout)
    ]
)
logger = logging.getLogger(__name__)


def _config(args, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    return load_experiment_config(args.config, overrides)


def _dataset(args) -> Dataset:
    if not args.config:
        raise NdnfError('this command needs --config to locate the dataset')
    return load_dataset(_config(args).data)


def _split(dataset: Dataset, tag: str) -> Dataset:
    subset = dataset.subset(tag)
    if len(subset) == 0:
        logger.warning(f"Split '{tag}' is empty; using the whole dataset")
        return dataset
    return subset


def _save_discretised(checkpoint: ModelCheckpoint, model, out_dir: str, name: str, extra: Dict[str, Any]) -> str:
    path = os.path.join(out_dir, name)
    result = ModelCheckpoint(model=model, config=checkpoint.config, epoch=checkpoint.epoch, seed=checkpoint.seed,
                             metadata={**checkpoint.metadata, **extra})
    save_checkpoint(result, path)
    return path


def cmd_train(args) -> int:
    overrides = {'seed': args.seed, 'epochs': args.epochs}
    config = _config(args, overrides)
    dataset = load_dataset(config.data)
    train_ds = dataset.subset('train')
    rng = np.random.default_rng(config.train.seed)
    run = start_run(build_model(train_ds, config.train, rng), config.train, rng)
    history = train(run, train_ds, progress=sys.stdout.isatty())

    ensure_dir(args.out_dir)
    history.to_csv(os.path.join(args.out_dir, 'history.csv'), index=False, float_format='%.6f', lineterminator='\n')
    save_checkpoint(checkpoint_from_run(run, metadata={'dataset': dataset.name, 'features': dataset.feature_names}),
                    os.path.join(args.out_dir, 'checkpoint.json'))
    return 0


def cmd_eval(args) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    dataset = _split(_dataset(args), args.split)
    if args.rules:
        with open(args.rules, 'r', encoding='utf-8') as f:
            subject = parse_asp(f.read())
        # labels without rules are absent from the parsed heads
        subject.label_heads = label_heads(dataset.task, dataset.n_outputs)
        mode = 'bivalent'
    else:
        subject, mode = checkpoint.model, args.mode
    result = evaluate(subject, dataset, mode=mode)
    print(f"macro_f1={result.macro_f1:.4f} accuracy={result.accuracy:.4f} n={result.n_samples}")
    print('per_class_f1=' + ','.join(f"{v:.4f}" for v in result.per_class_f1))
    return 0


def cmd_discretise(args) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    selection = _split(_dataset(args), args.eval_split)
    scope = ThresholdScope(args.scope)
    if args.tau == 'sweep':
        choice = sweep_tau(checkpoint.model, selection, scope, args.metric)
    else:
        choice = zero_tau(checkpoint.model, selection, scope, args.metric)
    model = apply_threshold(checkpoint.model, choice.tau, scope)

    ensure_dir(args.out_dir)
    _save_discretised(checkpoint, model, args.out_dir, 'thresholded.json', {'tau': choice.tau})
    table = choice.table if choice.table is not None else pd.DataFrame({'tau': [choice.tau], choice.metric: [choice.value]})
    if args.format == 'csv':
        print(table.to_csv(index=False, float_format='%.6f', lineterminator='\n'), end='')
    else:
        print(table.to_string(index=False))
        print(f"selected tau={choice.tau:.6g} {choice.metric}={choice.value:.4f}")
    return 0


def cmd_disentangle(args) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    selection = _split(_dataset(args), args.eval_split) if args.config else None
    model, provenance, choice = disentangle_model(
        checkpoint.model, budget_secs=args.budget_secs, disj_tau=args.disj_tau, eval_dataset=selection,
        verify=args.verify, fan_in_cap=args.fan_in_cap)

    ensure_dir(args.out_dir)
    extra = {'disj_tau': choice.tau if choice is not None else None}
    _save_discretised(checkpoint, model, args.out_dir, 'disentangled.json', extra)
    save_text(''.join(f"{record.to_line()}\n" for record in provenance),
              os.path.join(args.out_dir, 'provenance.log'))
    return 0


def cmd_emit_rules(args) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    model = checkpoint.model
    if model.task is TaskKind.MULTICLASS:
        if args.config:
            program = emit_mt_program(model, _dataset(args).subset('train'))
        else:
            logger.warning('No --config given; emitting conjunction rules without annotated rules')
            program = translate(model, flatten=False)
    else:
        program = translate(model, flatten=not args.no_flatten)

    ensure_dir(args.out_dir)
    if args.format == 'csv-metrics':
        report = compactness(program, conj_only=model.task is TaskKind.MULTICLASS)
        frame = pd.DataFrame([{'max_rule_length': report.max_rule_length,
                               'avg_rule_length': report.avg_rule_length, 'num_rules': report.num_rules}])
        text = frame.to_csv(index=False, float_format='%.6f', lineterminator='\n')
        save_text(text, os.path.join(args.out_dir, 'compactness.csv'))
    else:
        text = emit_asp(program)
        save_text(text, os.path.join(args.out_dir, 'rules.lp'))
    print(text, end='')
    return 0


def cmd_truth_table(args) -> int:
    weights = np.array([float(v) for v in args.weights.split(',') if v.strip()])
    sign = NodeKind(args.kind).delta_sign
    table = enumerate_truth_table(weights, sign * args.delta, fan_in_cap=args.fan_in_cap)
    print(render_truth_table(table, args.format), end='')
    return 0


def cmd_bench(args) -> int:
    frame = bench_disentangle(args.fan_in_min, args.fan_in_max, args.trials, args.budget_secs,
                              seed=args.seed or 0, progress=sys.stdout.isatty())
    ensure_dir(args.out_dir)
    write_bench(frame, os.path.join(args.out_dir, 'bench.csv'), os.path.join(args.out_dir, 'bench.dat'))
    print(bench_summary(frame).to_string(index=False))
    return 0


def cmd_experiment(args) -> int:
    config = _config(args, {'seeds': str(args.seed) if args.seed is not None else None})
    bundle = run_experiment(config, os.path.join(args.out_dir, config.name))
    print(bundle.text, end='')
    return 0


COMMANDS = {
    'train': cmd_train,
    'eval': cmd_eval,
    'discretise': cmd_discretise,
    'disentangle': cmd_disentangle,
    'emit-rules': cmd_emit_rules,
    'truth-table': cmd_truth_table,
    'bench': cmd_bench,
    'experiment': cmd_experiment,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the `ndnf` command."""
    args = parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return COMMANDS[args.command](args)
    except (NdnfError, ValidationError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
