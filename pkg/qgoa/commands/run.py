import argparse
from pathlib import Path

from qgoa.ansatz import Algorithm, AggregationSplit
from qgoa.commands import Command, adam_config, add_adam_arguments, add_instance_arguments, instance_source
from qgoa.harness import ExperimentConfig, run_single
from qgoa.report import emit_report


class RunCommand(Command):
    """Optimize one circuit on one instance."""

    help = 'single experiment'

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Called when the parser is built."""
        add_instance_arguments(parser)
        parser.add_argument('--alg', choices=[alg.value for alg in Algorithm], default=Algorithm.QGOA.value)
        parser.add_argument('--layers', type=int, required=True)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--split', choices=[split.value for split in AggregationSplit])
        parser.add_argument('--out', default='results')
        add_adam_arguments(parser)

    def run(self, args: argparse.Namespace) -> int:
        """Called with the parsed arguments; returns the exit status."""
        extra = {'split': AggregationSplit(args.split)} if args.split else {}
        cfg = ExperimentConfig(
            **instance_source(args),
            **extra,
            algorithm=Algorithm(args.alg),
            layers=[args.layers],
            seeds=[args.seed],
            adam=adam_config(args),
            output_dir=Path(args.out),
        )
        result = run_single(cfg, args.layers, args.seed)
        emit_report([result], cfg.output_dir)
        print(result.id, format(result.final_loss, '.17g'), result.p_optimal, result.argmax_match)
        return 0
