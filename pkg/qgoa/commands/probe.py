import argparse
from pathlib import Path

import numpy as np

from qgoa.commands import Command
from qgoa.harness import locality_probe
from qgoa.report import format_value, write_matrix

LABELS = ['V1', 'V2', 'V3']


class ProbeLocalityCommand(Command):
    """Feature sensitivities on the 3-vertex path."""

    help = 'd<Z_i>/dx_j on the path V2 - V1 - V3'

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Called when the parser is built."""
        parser.add_argument('--eta', type=float, default=0.7)
        parser.add_argument('--seed', type=int, default=0, help='Draws the features and angles')
        parser.add_argument('--eps', type=float, default=1e-5)
        parser.add_argument('--out', default='results')

    def run(self, args: argparse.Namespace) -> int:
        """Called with the parsed arguments; returns the exit status."""
        rng = np.random.default_rng(args.seed)
        x, theta_y, theta_z = rng.uniform(-np.pi, np.pi, size=(3, 3))
        matrix = locality_probe(x, theta_y, theta_z, args.eta, args.eps)
        write_matrix(matrix, Path(args.out) / 'locality.csv', LABELS)
        for label, row in zip(LABELS, matrix):
            print(label, ' '.join(format_value(value) for value in row))
        return 0
