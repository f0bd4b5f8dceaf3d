import argparse
import logging
from pathlib import Path

from qgoa.commands import Command
from qgoa.report import load_runs, write_summaries

logger = logging.getLogger(__name__)


class ReportCommand(Command):
    """Rebuild the summary files from an existing runs.jsonl."""

    help = 're-aggregate runs.jsonl'

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Called when the parser is built."""
        parser.add_argument('--runs', required=True, help='runs.jsonl from run or sweep')
        parser.add_argument('--out', help='Defaults to the directory of --runs')

    def run(self, args: argparse.Namespace) -> int:
        """Called with the parsed arguments; returns the exit status."""
        runs_path = Path(args.runs)
        results = load_runs(runs_path)
        output_dir = Path(args.out) if args.out else runs_path.parent
        write_summaries(sorted(results, key=lambda r: r.sort_key), output_dir)
        logger.info("Re-aggregated %s run(s) into %s", len(results), output_dir)
        return 0
