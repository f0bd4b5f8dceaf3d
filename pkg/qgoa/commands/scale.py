import argparse
from pathlib import Path

from qgoa.ansatz import Algorithm
from qgoa.commands import Command, adam_config, add_adam_arguments, parse_range
from qgoa.harness import ScaleConfig, scalability_curve
from qgoa.report import write_scale


class ScaleCommand(Command):
    """Resource scaling over register sizes."""

    help = 'two-qubit gate and T * N_p cost per register size'

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Called when the parser is built."""
        parser.add_argument('--kind', choices=['portfolio', 'mvc'])
        parser.add_argument('--sizes', type=parse_range, required=True, help='A..B')
        parser.add_argument('--density', type=float, help='Edges per qubit')
        parser.add_argument('--alg', choices=[alg.value for alg in Algorithm] + ['both'], default='both')
        parser.add_argument('--layers', type=parse_range)
        parser.add_argument('--seeds', type=int)
        parser.add_argument('--threads', type=int)
        parser.add_argument('--out', default='results')
        add_adam_arguments(parser)

    def run(self, args: argparse.Namespace) -> int:
        """Called with the parsed arguments; returns the exit status."""
        given = {
            'kind': args.kind,
            'density': args.density,
            'layers': args.layers,
            'seeds': list(range(args.seeds)) if args.seeds else None,
        }
        cfg = ScaleConfig(
            **{name: value for name, value in given.items() if value is not None},
            sizes=args.sizes,
            algorithms=list(Algorithm) if args.alg == 'both' else [Algorithm(args.alg)],
            adam=adam_config(args),
        )
        rows = scalability_curve(cfg, args.threads)
        write_scale(rows, Path(args.out) / 'scale.csv')
        return 0
