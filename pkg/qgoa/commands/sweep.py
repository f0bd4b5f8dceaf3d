import argparse
from pathlib import Path

from qgoa.ansatz import Algorithm
from qgoa.commands import (
    Command,
    adam_config,
    add_adam_arguments,
    add_instance_arguments,
    instance_source,
    parse_range,
)
from qgoa.harness import ExperimentConfig, sweep
from qgoa.report import emit_report

ALG_CHOICES = [alg.value for alg in Algorithm] + ['both']


class SweepCommand(Command):
    """Run every (algorithm, layer, seed) cell and write the report."""

    help = 'layer x seed sweep'

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Called when the parser is built."""
        add_instance_arguments(parser)
        parser.add_argument('--alg', choices=ALG_CHOICES, default='both')
        parser.add_argument('--layers', type=parse_range, required=True, help='A..B')
        parser.add_argument('--seeds', type=int, default=10, help='Seeds 0..k-1')
        parser.add_argument('--threads', type=int, help='Worker processes (default $QGOA_THREADS or 1)')
        parser.add_argument('--out', default='results')
        add_adam_arguments(parser)

    def run(self, args: argparse.Namespace) -> int:
        """Called with the parsed arguments; returns the exit status."""
        algorithms = list(Algorithm) if args.alg == 'both' else [Algorithm(args.alg)]
        cfg = ExperimentConfig(
            **instance_source(args),
            algorithm=algorithms[0],
            layers=args.layers,
            seeds=list(range(args.seeds)),
            adam=adam_config(args),
            output_dir=Path(args.out),
        )
        results = sweep(cfg, algorithms, args.threads)
        emit_report(results, cfg.output_dir)
        return 1 if all(result.status == 'failed' for result in results) else 0
