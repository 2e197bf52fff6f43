"""
Configuration settings for the neural DNF toolkit.

This module contains the environment-derived settings, package-wide constants
and the command line parser used throughout the pipeline.
"""

import os
import sys
import argparse
from typing import List, Optional
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Worker cap for per-node disentanglement and per-seed experiment jobs
NDNF_THREADS = int(os.getenv("NDNF_THREADS", str(os.cpu_count() or 1)))

# Optional local copy of a UCI Monk problem file (never downloaded)
NDNF_MONK_PATH = os.getenv("NDNF_MONK_PATH", "")

# Discretised weights live on {-LATTICE_WEIGHT, 0, LATTICE_WEIGHT}
LATTICE_WEIGHT = 6.0

# Oracle and search budgets
DEFAULT_FAN_IN_CAP = 20
DEFAULT_BUDGET_SECS = 180.0
MAX_REPORTED_VIOLATIONS = 100

CHECKPOINT_FORMAT_VERSION = 1

DEFAULT_OUT_DIR = os.getenv("NDNF_OUT_DIR", "results")

# Options whose comma separated values may start with a minus sign
LIST_OPTIONS = ("--weights",)


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', type=str,
                        help='Key/value config file (KEY=value per line)')
    parser.add_argument('--seed', type=int,
                        help='Override the seed from the config file')
    parser.add_argument('--out-dir', type=str, default=DEFAULT_OUT_DIR,
                        help=f'Directory for checkpoints, rule files and reports (default: {DEFAULT_OUT_DIR})')
    parser.add_argument('--verbose', action='store_true',
                        help='Enable debug logging')
    return parser


def build_parser() -> argparse.ArgumentParser:
    """
    Build the `ndnf` command line parser.

    Returns:
        Parser with one subcommand per pipeline stage
    """
    common = _common_parser()
    parser = argparse.ArgumentParser(prog='ndnf', description='Neural DNF training and rule extraction')
    sub = parser.add_subparsers(dest='command', required=True)

    train = sub.add_parser('train', parents=[common], help='Train a neural DNF / DNF-MT model')
    train.add_argument('--epochs', type=int, help='Override the number of epochs')

    evaluate = sub.add_parser('eval', parents=[common], help='Evaluate a checkpoint or rule file')
    evaluate.add_argument('--checkpoint', type=str, required=True)
    evaluate.add_argument('--split', type=str, default='test',
                          help='Dataset split to evaluate on (default: test)')
    evaluate.add_argument('--mode', choices=['neural', 'bivalent'], default='neural')
    evaluate.add_argument('--rules', type=str,
                          help='Rule file to evaluate in bivalent mode (default: translate the checkpoint)')

    discretise = sub.add_parser('discretise', parents=[common], help='Threshold discretisation')
    discretise.add_argument('--checkpoint', type=str, required=True)
    discretise.add_argument('--method', choices=['threshold'], default='threshold')
    discretise.add_argument('--scope', choices=['model', 'disj'], default='model')
    discretise.add_argument('--eval', dest='eval_split', type=str, default='val',
                            help='Split used to select tau (default: val)')
    discretise.add_argument('--tau', choices=['zero', 'sweep'], default='sweep')
    discretise.add_argument('--metric', choices=['macro_f1', 'accuracy'], default='macro_f1')
    discretise.add_argument('--format', choices=['text', 'csv'], default='text')

    disentangle = sub.add_parser('disentangle', parents=[common], help='Disentangle conjunctive nodes')
    disentangle.add_argument('--checkpoint', type=str, required=True)
    disentangle.add_argument('--budget-secs', type=float, default=DEFAULT_BUDGET_SECS)
    disentangle.add_argument('--verify', choices=['off', 'enumerable'], default='off')
    disentangle.add_argument('--disj-tau', choices=['zero', 'sweep'], default='sweep')
    disentangle.add_argument('--eval', dest='eval_split', type=str, default='val')
    disentangle.add_argument('--fan-in-cap', type=int, default=DEFAULT_FAN_IN_CAP)

    emit = sub.add_parser('emit-rules', parents=[common], help='Translate a discretised checkpoint')
    emit.add_argument('--checkpoint', type=str, required=True)
    emit.add_argument('--format', choices=['asp', 'csv-metrics'], default='asp')
    emit.add_argument('--no-flatten', action='store_true',
                      help='Keep conjunction heads instead of inlining them into label rules')

    table = sub.add_parser('truth-table', parents=[common], help='Print a soft-valued truth table')
    table.add_argument('--weights', type=str, required=True,
                       help='Comma separated weights, e.g. "-6,-2,-2,2,-6"')
    table.add_argument('--delta', type=float, default=1.0)
    table.add_argument('--kind', choices=['conjunctive', 'disjunctive'], default='conjunctive')
    table.add_argument('--format', choices=['text', 'csv'], default='text')
    table.add_argument('--fan-in-cap', type=int, default=DEFAULT_FAN_IN_CAP)

    bench = sub.add_parser('bench', parents=[common], help='Disentanglement runtime benchmark')
    bench.add_argument('--fan-in-min', type=int, default=2)
    bench.add_argument('--fan-in-max', type=int, default=16)
    bench.add_argument('--trials', type=int, default=5)
    bench.add_argument('--budget-secs', type=float, default=DEFAULT_BUDGET_SECS)

    sub.add_parser('experiment', parents=[common], help='Multi-seed thresholding vs disentanglement run')

    return parser


def _join_list_values(argv: List[str]) -> List[str]:
    """Rewrite `--weights -6,-2` as `--weights=-6,-2` so argparse does not read the value as a flag."""
    joined: List[str] = []
    args = iter(argv)
    for arg in args:
        if arg in LIST_OPTIONS:
            value = next(args, None)
            joined.append(arg if value is None else f"{arg}={value}")
        else:
            joined.append(arg)
    return joined


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command line arguments for the pipeline.

    Args:
        argv: Argument list (defaults to sys.argv[1:])

    Returns:
        Parsed arguments
    """
    argv = sys.argv[1:] if argv is None else argv
    return build_parser().parse_args(_join_list_values(list(argv)))


def worker_count(requested: Optional[int] = None) -> int:
    """Number of workers to use, capped by NDNF_THREADS."""
    cap = max(1, NDNF_THREADS)
    if requested is None:
        return cap
    return max(1, min(requested, cap))
