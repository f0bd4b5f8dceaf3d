import csv
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from qgoa.harness import LayerSummary, RunResult, ScaleRow, best_layers, summarize_layers

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    'alg', 'layer', 'seed', 'T', 'final_loss', 'p_optimal', 'argmax_match',
    'n1_actual', 'n2_actual', 'n1_paper', 'n2_paper', 'np',
]
LAYER_COLUMNS = ['alg', 'layer', 'runs', 'failed', 'best_loss', 'median_loss', 'mean_p_optimal', 'success_rate']
BEST_LAYER_COLUMNS = ['alg', 'best_layer', 'median_loss']
SCALE_COLUMNS = ['alg', 'n_qubits', 'n_edges', 'best_layer', 'n2_actual', 'T', 'np', 'classical_cost']


def format_value(value: Any) -> str:
    """CSV cell text: floats with 17 significant digits, booleans lower case, None empty"""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write a header and formatted rows"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as file:
        writer = csv.writer(file)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(value) for value in row])


def summary_row(result: RunResult) -> list[Any]:
    """One summary.csv row"""
    actual, paper = result.gate_counts, result.paper_model
    return [
        result.algorithm.value,
        result.layer,
        result.seed,
        result.converged_T,
        result.final_loss,
        result.p_optimal,
        result.argmax_match,
        actual.singles if actual else None,
        actual.doubles if actual else None,
        paper.singles if paper else None,
        paper.doubles if paper else None,
        result.n_params,
    ]


def layer_row(summary: LayerSummary) -> list[Any]:
    """One layers.csv row"""
    return [
        summary.algorithm.value, summary.layer, summary.runs, summary.failed,
        summary.best_loss, summary.median_loss, summary.mean_p_optimal, summary.success_rate,
    ]


def write_summaries(results: Sequence[RunResult], output_dir: Path) -> None:
    """summary.csv, layers.csv and best_layers.csv"""
    write_csv(output_dir / 'summary.csv', SUMMARY_COLUMNS, (summary_row(r) for r in results))
    layers = summarize_layers(results)
    write_csv(output_dir / 'layers.csv', LAYER_COLUMNS, (layer_row(s) for s in layers))
    best = sorted(best_layers(layers).values(), key=lambda s: s.algorithm.value)
    write_csv(output_dir / 'best_layers.csv', BEST_LAYER_COLUMNS,
              ([s.algorithm.value, s.layer, s.median_loss] for s in best))


def emit_report(results: Sequence[RunResult], output_dir: Path) -> None:
    """
    Write every report file for a set of runs

    runs.jsonl holds one result per line; traces/<id>.csv and distributions/<id>.csv are per run.
    """
    output_dir = Path(output_dir)
    results = sorted(results, key=lambda r: r.sort_key)
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        with open(output_dir / 'runs.jsonl', 'w', encoding='utf-8') as file:
            for result in results:
                file.write(result.model_dump_json() + '\n')

        write_summaries(results, output_dir)

        for result in results:
            if result.trace is not None:
                rows = zip(range(len(result.trace.losses)), result.trace.losses, result.trace.grad_norms)
                write_csv(output_dir / result.trace_path, ['iteration', 'loss', 'grad_norm'], rows)
            if result.top_distribution:
                write_csv(output_dir / 'distributions' / f'{result.id}.csv', ['bitstring', 'probability'],
                          result.top_distribution.items())
    except OSError as error:
        raise OSError(f'Cannot write report to {output_dir}: {error}') from error
    logger.info("Wrote %s run(s) to %s", len(results), output_dir)


def load_runs(path: Path) -> list[RunResult]:
    """Read a runs.jsonl file"""
    with open(path, encoding='utf-8') as file:
        return [RunResult.model_validate_json(line) for line in file if line.strip()]


def write_scale(rows: Sequence[ScaleRow], path: Path) -> None:
    """scale.csv, one row per (algorithm, size)"""
    write_csv(Path(path), SCALE_COLUMNS, (
        [row.algorithm.value, row.n_qubits, row.n_edges, row.best_layer, row.n2_actual, row.T, row.np,
         row.classical_cost]
        for row in sorted(rows, key=lambda r: (r.algorithm.value, r.n_qubits))
    ))


def write_matrix(matrix: np.ndarray, path: Path, labels: Sequence[str]) -> None:
    """A labelled square matrix as CSV"""
    write_csv(Path(path), [''] + list(labels), ([label] + list(row) for label, row in zip(labels, matrix)))
