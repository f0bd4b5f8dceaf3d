import abc
import argparse
import logging
from pathlib import Path
from typing import Optional, Sequence

from qgoa.harness import GeneratorSpec
from qgoa.optimizer import AdamConfig, GradientEngine

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


class Command(abc.ABC):
    """A named subcommand of the command line."""

    help: str = ''

    @abc.abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser):
        """Called when the parser is built."""
        pass

    @abc.abstractmethod
    def run(self, args: argparse.Namespace) -> int:
        """Called with the parsed arguments; returns the exit status."""
        pass


class CommandManager:
    """A manager to register and dispatch commands"""

    commands: dict[str, Command]
    default_log_level: str

    def __init__(self, default_log_level: str = 'INFO'):
        self.commands = {}
        self.default_log_level = default_log_level

    def add_command(self, name: str, command: Command):
        """Add a command to the manager."""
        self.commands[name] = command

    def build_parser(self) -> argparse.ArgumentParser:
        """Parser with one subparser per registered command"""
        parser = argparse.ArgumentParser(prog='qgoa', description='Graph-aggregation and QAOA ansatz experiments')
        parser.add_argument('--log-level', choices=LOG_LEVELS, default=self.default_log_level)
        subparsers = parser.add_subparsers(dest='command', required=True)
        for name, command in self.commands.items():
            command.add_arguments(subparsers.add_parser(name, help=command.help))
        return parser

    def parse(self, argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
        """Parse a command line"""
        return self.build_parser().parse_args(argv)

    def dispatch(self, args: argparse.Namespace) -> int:
        """Run the command named in parsed arguments"""
        logging.getLogger(__name__).info("Running %s", args.command)
        status = self.commands[args.command].run(args)
        logging.getLogger(__name__).info("Finished %s with status %s", args.command, status)
        return status


def parse_range(text: str) -> list[int]:
    """'A..B' (inclusive), 'A,B,C' or a single integer"""
    try:
        if '..' in text:
            start, stop = text.split('..', 1)
            values = list(range(int(start), int(stop) + 1))
        else:
            values = [int(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f'Expected A..B, a comma list or an integer, got {text!r}')
    if not values:
        raise argparse.ArgumentTypeError(f'Range {text!r} is empty')
    return values


def add_adam_arguments(parser: argparse.ArgumentParser):
    """Optimizer flags; unset flags fall back to AdamConfig defaults"""
    group = parser.add_argument_group('optimizer')
    group.add_argument('--lr', dest='learning_rate', type=float)
    group.add_argument('--beta1', type=float)
    group.add_argument('--beta2', type=float)
    group.add_argument('--epsilon', type=float)
    group.add_argument('--max-iters', dest='max_iters', type=int)
    group.add_argument('--tol', type=float)
    group.add_argument('--window', type=int)
    group.add_argument('--engine', choices=[engine.value for engine in GradientEngine])


def adam_config(args: argparse.Namespace) -> AdamConfig:
    """AdamConfig from the optimizer flags that were given"""
    given = {name: getattr(args, name, None) for name in AdamConfig.model_fields}
    return AdamConfig(**{name: value for name, value in given.items() if value is not None})


def add_instance_arguments(parser: argparse.ArgumentParser):
    """Either an instance file or generator flags"""
    parser.add_argument('--instance', type=str, help='Instance JSON written by gen')
    parser.add_argument('--kind', choices=['portfolio', 'mvc'], help='Generate instead of loading')
    parser.add_argument('--n', type=int)
    parser.add_argument('--edges', type=int)
    parser.add_argument('--lambda', dest='lambda_', type=float)
    parser.add_argument('--b', type=float)
    parser.add_argument('--instance-seed', dest='instance_seed', type=int)


def generator_fields(args: argparse.Namespace) -> dict:
    """GeneratorSpec keyword arguments from the flags that were given"""
    fields = {
        'kind': args.kind,
        'n': args.n,
        'edges': args.edges,
        'lambda_': args.lambda_,
        'b': args.b,
        'seed': getattr(args, 'instance_seed', None),
    }
    return {name: value for name, value in fields.items() if value is not None}


def instance_source(args: argparse.Namespace) -> dict:
    """ExperimentConfig keyword arguments naming the instance"""
    if args.instance is not None:
        return {'instance_path': Path(args.instance)}
    if args.kind is None:
        raise ValueError('Give --instance or generator flags (--kind, --n, --edges)')
    return {'generator': GeneratorSpec(**generator_fields(args))}
