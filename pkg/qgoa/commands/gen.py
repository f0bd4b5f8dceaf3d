import argparse
import logging
from pathlib import Path

from qgoa.commands import Command, generator_fields
from qgoa.harness import GeneratorSpec
from qgoa.problems import save_instance

logger = logging.getLogger(__name__)


class GenCommand(Command):
    """Generate a benchmark instance and write it as JSON."""

    help = 'generate a portfolio or vertex cover instance'

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Called when the parser is built."""
        parser.add_argument('--kind', choices=['portfolio', 'mvc'], required=True)
        parser.add_argument('--n', type=int, required=True)
        parser.add_argument('--edges', type=int, required=True)
        parser.add_argument('--lambda', dest='lambda_', type=float)
        parser.add_argument('--b', type=float)
        parser.add_argument('--seed', dest='instance_seed', type=int)
        parser.add_argument('--out', required=True)

    def run(self, args: argparse.Namespace) -> int:
        """Called with the parsed arguments; returns the exit status."""
        instance = GeneratorSpec(**generator_fields(args)).generate()
        logger.info("Generated %s instance: n=%s, %s edges", instance.kind.type, instance.n, len(instance.pairs))
        save_instance(instance, Path(args.out))
        print(args.out)
        return 0
