import argparse
import logging
from pathlib import Path

from qgoa.commands import Command
from qgoa.problems import brute_force, load_instance

logger = logging.getLogger(__name__)


class SolveCommand(Command):
    """Brute force an instance."""

    help = 'exhaustive search for the optimum of an instance'

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Called when the parser is built."""
        parser.add_argument('--instance', required=True)
        parser.add_argument('--out', help='Also write the result as JSON')

    def run(self, args: argparse.Namespace) -> int:
        """Called with the parsed arguments; returns the exit status."""
        instance = load_instance(Path(args.instance))
        logger.info("Solving %s instance with %s variables", instance.kind.type, instance.n)
        oracle = brute_force(instance)
        print(format(oracle.optimal_value, '.17g'), ' '.join(oracle.optimal_bitstrings))
        if args.out:
            Path(args.out).write_text(oracle.model_dump_json(indent=2) + '\n', encoding='utf-8')
        return 0
