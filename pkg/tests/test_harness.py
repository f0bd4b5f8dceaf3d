import csv
import json

import numpy as np
import pytest

from qgoa.ansatz import Algorithm
from qgoa.harness import (
    ExperimentConfig,
    GeneratorSpec,
    RunResult,
    ScaleConfig,
    best_layers,
    locality_probe,
    run_single,
    scalability_curve,
    success_metrics,
    summarize_layers,
    sweep,
)
from qgoa.optimizer import AdamConfig
from qgoa.problems import OracleResult, save_instance
from qgoa.report import SUMMARY_COLUMNS, emit_report, load_runs

FAST = AdamConfig(max_iters=20)


@pytest.fixture
def path_config(tmp_path, path_mvc) -> ExperimentConfig:
    path = tmp_path / 'path.json'
    save_instance(path_mvc, path)
    return ExperimentConfig(instance_path=path, adam=AdamConfig(max_iters=300), output_dir=tmp_path / 'out')


def _oracle(*bits):
    return OracleResult(optimal_value=0.0, optimal_bitstrings=list(bits), evaluations=8)


def _read_csv(path):
    with open(path, newline='', encoding='utf-8') as file:
        return list(csv.reader(file))


def test_success_metrics():
    assert success_metrics({'010': 1.0}, _oracle('010')) == (1.0, True)

    uniform = {format(i, '03b'): 0.125 for i in range(8)}
    p_optimal, argmax_match = success_metrics(uniform, _oracle('001', '110'))
    assert p_optimal == pytest.approx(0.25)
    assert argmax_match

    p_optimal, argmax_match = success_metrics({'000': 0.6, '010': 0.4}, _oracle('010'))
    assert p_optimal == pytest.approx(0.4)
    assert not argmax_match


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        ExperimentConfig()
    with pytest.raises(ValueError):
        ExperimentConfig(instance_path=tmp_path / 'x.json', generator=GeneratorSpec(kind='mvc', n=3, edges=2))
    with pytest.raises(ValueError):
        ExperimentConfig(generator=GeneratorSpec(kind='mvc', n=3, edges=2), seeds=[])
    with pytest.raises(ValueError):
        ExperimentConfig(generator=GeneratorSpec(kind='mvc', n=3, edges=2), layers=[0])


def test_qgoa_finds_path_cover(path_config):
    result = run_single(path_config, layer=2, seed=0)
    assert result.status == 'ok'
    assert result.optimal_bitstrings == ['010']
    assert result.argmax_match
    assert result.final_loss >= result.oracle_optimum - 1e-9
    assert result.p_optimal == sum(result.optimal_probabilities)
    assert 0.0 <= result.p_optimal <= 1.0
    assert result.gate_counts == result.paper_model
    assert result.n_params == result.paper_n_params == 14
    assert result.trace_path == 'traces/qgoa-L2-s0.csv'


def test_qaoa_at_zero_angles_is_uniform(path_config):
    cfg = path_config.model_copy(update={'algorithm': Algorithm.QAOA, 'adam': AdamConfig(max_iters=1)})
    result = run_single(cfg, layer=1, seed=0, init=np.zeros(2))
    assert result.p_optimal == pytest.approx(1 / 8)
    assert result.argmax_match
    assert result.final_loss >= result.oracle_optimum - 1e-9
    assert result.gate_counts == result.paper_model


def test_portfolio_run_logs_gate_discrepancy(caplog):
    cfg = ExperimentConfig(generator=GeneratorSpec(kind='portfolio', n=5, edges=6), adam=AdamConfig(max_iters=3))
    result = run_single(cfg, layer=1, seed=0)
    assert result.gate_counts.doubles == result.paper_model.doubles
    assert result.gate_counts.singles != result.paper_model.singles
    assert 'published formula' in caplog.text


def test_sweep_cardinality_and_order():
    spec = GeneratorSpec(kind='mvc', n=4, edges=4)
    cfg = ExperimentConfig(generator=spec, layers=[1, 2], seeds=[0, 1, 2], adam=FAST)
    results = sweep(cfg, [Algorithm.QGOA, Algorithm.QAOA], threads=1)
    assert len(results) == 12
    keys = [r.sort_key for r in results]
    assert keys == sorted(keys)
    assert all(r.status == 'ok' for r in results)


def test_sweep_is_deterministic_across_workers():
    cfg = ExperimentConfig(generator=GeneratorSpec(kind='portfolio', n=4, edges=3), layers=[1, 2], seeds=[0, 1],
                           adam=FAST)
    assert sweep(cfg, threads=1) == sweep(cfg, threads=2)


def test_sweep_records_failed_cells():
    # no edges: the graph ansatz has nothing to aggregate, the alternating ansatz still runs
    cfg = ExperimentConfig(generator=GeneratorSpec(kind='mvc', n=3, edges=0), layers=[1], seeds=[0, 1], adam=FAST)
    results = sweep(cfg, [Algorithm.QGOA, Algorithm.QAOA], threads=1)
    by_alg = {alg: [r.status for r in results if r.algorithm is alg] for alg in Algorithm}
    assert by_alg[Algorithm.QGOA] == ['failed', 'failed']
    assert by_alg[Algorithm.QAOA] == ['ok', 'ok']
    assert 'ValueError' in results[-1].error


def test_layer_summary_and_best_layer():
    def result(layer, seed, loss, match):
        return RunResult(id=f'qgoa-L{layer}-s{seed}', algorithm=Algorithm.QGOA, layer=layer, seed=seed, kind='mvc',
                         n_qubits=3, n_edges=2, final_loss=loss, converged_T=10 * layer, p_optimal=0.5,
                         argmax_match=match)

    results = [result(1, 0, 2.0, False), result(1, 1, 1.0, True), result(1, 2, 1.5, True),
               result(2, 0, 1.0, True), result(2, 1, 9.0, False), result(2, 2, 1.1, True)]
    summaries = summarize_layers(results)
    assert [(s.layer, s.best_loss, s.median_loss) for s in summaries] == [(1, 1.0, 1.5), (2, 1.0, 1.1)]
    assert summaries[0].success_rate == pytest.approx(2 / 3)
    assert best_layers(summaries)[Algorithm.QGOA].layer == 2


def test_scalability_curve_is_monotone():
    cfg = ScaleConfig(kind='mvc', sizes=[4, 5, 6], layers=[1], adam=AdamConfig(max_iters=5))
    rows = scalability_curve(cfg, threads=1)
    assert len(rows) == 6
    for alg in Algorithm:
        doubles = [row.n2_actual for row in rows if row.algorithm is alg]
        assert doubles == sorted(doubles)
    for row in rows:
        assert row.classical_cost == row.T * row.np
        assert row.n_edges == min(2 * row.n_qubits, row.n_qubits * (row.n_qubits - 1) // 2)


def test_locality_without_aggregation_is_local():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, theta_y, theta_z = rng.uniform(-np.pi, np.pi, size=(3, 3))
        sensitivity = locality_probe(x, theta_y, theta_z, eta=0.0)
        off_diagonal = sensitivity[~np.eye(3, dtype=bool)]
        assert np.all(np.abs(off_diagonal) < 1e-8)
        assert np.all(np.abs(np.diag(sensitivity)) > 1e-8)


def test_locality_with_aggregation_couples_neighbours():
    rng = np.random.default_rng(1)
    neighbour, distant = [], []
    for _ in range(20):
        x, theta_y, theta_z = rng.uniform(-np.pi, np.pi, size=(3, 3))
        sensitivity = locality_probe(x, theta_y, theta_z, eta=0.7)
        neighbour.append(abs(sensitivity[1, 0]))
        distant.append(abs(sensitivity[1, 2]))
    distant = np.array(distant)
    assert np.median(neighbour) >= 1e-3
    assert np.median(distant) >= 1e-3
    # single draws can land near a zero of the two-hop sensitivity
    assert np.all(distant > 1e-4)
    assert np.count_nonzero(distant >= 1e-3) >= 15


def test_emit_report_empty(tmp_path):
    emit_report([], tmp_path)
    assert _read_csv(tmp_path / 'summary.csv') == [SUMMARY_COLUMNS]
    assert (tmp_path / 'runs.jsonl').read_text() == ''


def test_emit_report_round_trip(tmp_path, path_config):
    result = run_single(path_config.model_copy(update={'adam': FAST}), layer=1, seed=0)
    emit_report([result], tmp_path)
    lines = (tmp_path / 'runs.jsonl').read_text().splitlines()
    assert len(lines) == 1
    assert RunResult.model_validate_json(lines[0]) == result
    assert load_runs(tmp_path / 'runs.jsonl') == [result]

    rows = _read_csv(tmp_path / 'summary.csv')
    assert rows[1][:3] == ['qgoa', '1', '0']
    assert float(rows[1][4]) == result.final_loss
    trace = _read_csv(tmp_path / result.trace_path)
    assert trace[0] == ['iteration', 'loss', 'grad_norm']
    assert len(trace) == len(result.trace.losses) + 1
    distribution = _read_csv(tmp_path / 'distributions' / f'{result.id}.csv')
    assert 1 < len(distribution) <= 33


def test_emit_report_orders_rows(tmp_path):
    cfg = ExperimentConfig(generator=GeneratorSpec(kind='mvc', n=3, edges=2), layers=[2, 1], seeds=[1, 0], adam=FAST)
    results = sweep(cfg, [Algorithm.QGOA, Algorithm.QAOA], threads=1)
    emit_report(list(reversed(results)), tmp_path)
    rows = _read_csv(tmp_path / 'summary.csv')[1:]
    assert [(r[0], int(r[1]), int(r[2])) for r in rows] == sorted((r[0], int(r[1]), int(r[2])) for r in rows)
    assert len(rows) == 8
    best = _read_csv(tmp_path / 'best_layers.csv')
    assert [row[0] for row in best[1:]] == ['qaoa', 'qgoa']


def test_emit_report_unwritable(tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('')
    with pytest.raises(OSError, match='file'):
        emit_report([], blocker)


def test_runs_jsonl_is_plain_json(tmp_path, path_config):
    result = run_single(path_config.model_copy(update={'adam': FAST}), layer=1, seed=0)
    emit_report([result], tmp_path)
    payload = json.loads((tmp_path / 'runs.jsonl').read_text())
    assert payload['algorithm'] == 'qgoa'
    assert payload['p_optimal'] == result.p_optimal


@pytest.mark.slow
def test_portfolio_benchmark():
    qgoa_runs, qaoa_runs = [], []
    for instance_seed in range(10):
        spec = GeneratorSpec(kind='portfolio', n=9, edges=30, lambda_=0.5, seed=instance_seed)
        qgoa_runs.append(run_single(ExperimentConfig(generator=spec, adam=AdamConfig(max_iters=500)), 2, 0))
        qaoa_cfg = ExperimentConfig(generator=spec, algorithm=Algorithm.QAOA, adam=AdamConfig(max_iters=2000))
        qaoa_runs.append(run_single(qaoa_cfg, 8, 0))
    successes = sum(1 for r in qgoa_runs if r.p_optimal >= 0.5 and r.argmax_match)
    assert successes >= 8
    assert np.median([r.final_loss for r in qgoa_runs]) <= np.median([r.final_loss for r in qaoa_runs])


@pytest.mark.slow
def test_vertex_cover_benchmark():
    matches = 0
    for instance_seed in range(10):
        spec = GeneratorSpec(kind='mvc', n=12, edges=17, b=1.0, seed=instance_seed)
        result = run_single(ExperimentConfig(generator=spec, adam=AdamConfig(max_iters=500)), 4, 0)
        matches += result.argmax_match
    assert matches >= 8
