import logging
import sys
from typing import Optional, Sequence

from qgoa.commands import CommandManager
from qgoa.commands.gen import GenCommand
from qgoa.commands.probe import ProbeLocalityCommand
from qgoa.commands.report import ReportCommand
from qgoa.commands.run import RunCommand
from qgoa.commands.scale import ScaleCommand
from qgoa.commands.solve import SolveCommand
from qgoa.commands.sweep import SweepCommand
from qgoa.errors import ConsistencyError, NonFiniteError

LOG_LEVEL = logging.INFO

logger = logging.getLogger(__name__)


def build_manager() -> CommandManager:
    """Every command, registered by name"""
    manager = CommandManager(default_log_level=logging.getLevelName(LOG_LEVEL))
    manager.add_command('gen', GenCommand())
    manager.add_command('solve', SolveCommand())
    manager.add_command('run', RunCommand())
    manager.add_command('sweep', SweepCommand())
    manager.add_command('scale', ScaleCommand())
    manager.add_command('probe-locality', ProbeLocalityCommand())
    manager.add_command('report', ReportCommand())
    return manager


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse and run one command

    Exit status 2 means bad input (arguments, instance files), 1 a failure while running.
    """
    manager = build_manager()
    args = manager.parse(argv)
    logging.getLogger().setLevel(args.log_level)
    try:
        return manager.dispatch(args)
    except FileNotFoundError as error:
        logger.error("%s", error)
        return 2
    except (NonFiniteError, ConsistencyError, OSError) as error:
        logger.error("%s", error)
        return 1
    except ValueError as error:
        logger.error("%s", error)
        return 2


def run() -> None:
    """Console entry point"""
    logging.basicConfig(format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    sys.exit(main())


if __name__ == "__main__":
    run()
