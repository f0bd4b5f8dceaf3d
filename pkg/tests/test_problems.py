import itertools
import json

import numpy as np
import pytest

from qgoa.errors import InstanceParseError, OracleBoundError
from qgoa.observables import compile_instance
from qgoa.problems import (
    GraphInstance,
    ProblemKind,
    QuboInstance,
    adjacency_graph,
    aggregation_graph,
    brute_force,
    gen_mvc,
    gen_portfolio,
    instance_graph,
    load_instance,
    portfolio_data,
    save_instance,
)
from tests.helpers import random_qubo


def test_portfolio_edge_count():
    inst = gen_portfolio(9, 30, 0.5, seed=0)
    assert len(inst.pairs) == 30
    assert len(instance_graph(inst).edges) == 30
    assert inst.kind == ProblemKind(type='portfolio', lambda_=0.5)


def test_portfolio_rejects_too_many_edges():
    with pytest.raises(ValueError):
        gen_portfolio(4, 7, 0.5, seed=0)
    with pytest.raises(ValueError):
        gen_portfolio(4, 2, 1.5, seed=0)


def test_pure_return_portfolio_takes_everything():
    inst = gen_portfolio(5, 4, 0.0, seed=2)
    assert all(w == 0.0 for w in inst.quad.values())
    assert all(d == 0.0 for d in inst.diag)
    assert brute_force(inst).optimal_bitstrings == ['11111']


def test_generators_are_deterministic(tmp_path):
    a, b = gen_portfolio(6, 7, 0.5, seed=11), gen_portfolio(6, 7, 0.5, seed=11)
    assert a == b
    save_instance(a, tmp_path / 'a.json')
    save_instance(b, tmp_path / 'b.json')
    assert (tmp_path / 'a.json').read_bytes() == (tmp_path / 'b.json').read_bytes()
    assert gen_mvc(8, 10, 1.0, seed=4) == gen_mvc(8, 10, 1.0, seed=4)
    assert gen_portfolio(6, 7, 0.5, seed=12) != a


def test_portfolio_data_round_trip():
    inst = gen_portfolio(5, 6, 0.3, seed=1)
    cov, mu, lam = portfolio_data(inst)
    assert lam == 0.3
    assert np.allclose(cov, cov.T)
    assert np.count_nonzero(np.triu(cov, 1)) == 6
    assert np.all((mu >= 0) & (mu <= 1))
    with pytest.raises(ValueError):
        portfolio_data(gen_portfolio(3, 1, 1.0, seed=0))


def test_mvc_generator():
    inst, graph = gen_mvc(12, 17, 1.0, seed=0)
    assert len(graph.edges) == 17
    assert len(inst.pairs) == 17
    assert inst.kind.type == 'mvc'
    assert inst.constant == 17.0


def test_mvc_single_edge_tie():
    inst, _ = gen_mvc(2, 1, 1.0, seed=0)
    oracle = brute_force(inst)
    assert oracle.optimal_value == 1.0
    # at b = 1 leaving the edge uncovered costs as much as covering it
    assert oracle.optimal_bitstrings == ['00', '01', '10']
    assert brute_force(gen_mvc(2, 1, 2.0, seed=0)[0]).optimal_bitstrings == ['00']
    assert brute_force(gen_mvc(2, 1, 0.5, seed=0)[0]).optimal_bitstrings == ['01', '10']


def test_mvc_path_cover(path_mvc):
    oracle = brute_force(path_mvc)
    assert oracle.optimal_value == 1.0
    assert oracle.optimal_bitstrings == ['010']


def test_instance_graph():
    inst = QuboInstance(n=2, quad={(0, 1): 0.5}, diag=(0.0, 0.0), linear=(0.0, 0.0))
    assert instance_graph(inst).edges == {(0, 1): 0.5}

    portfolio = gen_portfolio(4, 3, 0.5, seed=0)
    assert instance_graph(portfolio).vertex_weights == portfolio.diag
    assert all(w != 0.0 for w in instance_graph(portfolio).vertex_weights)

    mvc, _ = gen_mvc(6, 7, 1.0, seed=3)
    graph = aggregation_graph(mvc)
    assert graph == adjacency_graph(mvc)
    assert set(graph.edges.values()) == {1.0}
    assert not any(graph.vertex_weights)


def test_graph_validation():
    with pytest.raises(ValueError):
        GraphInstance(n=2, edges={(0, 0): 1.0})
    with pytest.raises(ValueError):
        GraphInstance(n=2, edges={(0, 1): 0.0})
    with pytest.raises(ValueError):
        GraphInstance(n=2, edges={(0, 2): 1.0})
    with pytest.raises(ValueError):
        GraphInstance(n=2, vertex_weights=(1.0,))


def test_brute_force_simple():
    inst = QuboInstance(n=1, diag=(0.0,), linear=(1.0,))
    oracle = brute_force(inst)
    assert oracle.optimal_value == 0.0
    assert oracle.optimal_bitstrings == ['0']
    assert oracle.evaluations == 2


def test_brute_force_keeps_exact_ties():
    inst = QuboInstance(n=2, quad={(0, 1): 1.0}, diag=(0.0, 0.0), linear=(-0.5, -0.5))
    assert brute_force(inst).optimal_bitstrings == ['01', '10']


def test_brute_force_keeps_rounding_ties():
    # 0.1 + 0.2 and 0.3 differ in the last bit
    inst = QuboInstance(n=2, quad={(0, 1): 1.0}, diag=(0.0, 0.0), linear=(-0.3, -(0.1 + 0.2)))
    oracle = brute_force(inst)
    assert oracle.optimal_bitstrings == ['01', '10']
    assert oracle.optimal_value == -(0.1 + 0.2)

    near = QuboInstance(n=2, quad={(0, 1): 1.0}, diag=(0.0, 0.0), linear=(-1.0, -1.0 - 1e-15))
    assert brute_force(near).optimal_bitstrings == ['01', '10']

    apart = QuboInstance(n=2, quad={(0, 1): 1.0}, diag=(0.0, 0.0), linear=(-1.0, -1.0 - 1e-9))
    assert brute_force(apart).optimal_bitstrings == ['10']


def test_brute_force_rejects_large_instances():
    inst = QuboInstance(n=25, diag=(0.0,) * 25, linear=(0.0,) * 25)
    with pytest.raises(OracleBoundError):
        brute_force(inst)


def test_brute_force_against_independent_evaluation(rng):
    for n in (1, 2, 3, 4):
        inst = random_qubo(rng, n)
        values = {''.join(bits): inst.evaluate(''.join(bits)) for bits in itertools.product('01', repeat=n)}
        optimum = min(values.values())
        oracle = brute_force(inst)
        assert oracle.optimal_value == pytest.approx(optimum, abs=1e-12)
        assert set(oracle.optimal_bitstrings) == {b for b, v in values.items() if abs(v - optimum) < 1e-12}


def test_oracle_agrees_with_compiled_observable():
    for seed in range(5):
        for inst in (gen_portfolio(9, 12, 0.5, seed), gen_mvc(9, 12, 1.0, seed)[0]):
            compiled = compile_instance(inst)
            minimum = float(compiled.observable.diagonal().min()) + compiled.offset
            assert minimum == pytest.approx(brute_force(inst).optimal_value, abs=1e-9)


def test_save_load_round_trip(tmp_path):
    for inst in (gen_portfolio(5, 4, 0.5, seed=1), gen_mvc(5, 4, 1.0, seed=1)[0]):
        path = tmp_path / f'{inst.kind.type}.json'
        save_instance(inst, path)
        assert load_instance(path) == inst
    payload = json.loads((tmp_path / 'portfolio.json').read_text())
    assert payload['kind'] == {'type': 'portfolio', 'lambda': 0.5}
    assert (tmp_path / 'portfolio.json').read_text().endswith('}\n')


def test_load_reports_missing_field(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({'kind': {'type': 'generic'}, 'seed': 0, 'diag': [], 'linear': [], 'quad': []}))
    with pytest.raises(InstanceParseError) as info:
        load_instance(path)
    assert info.value.field == 'n'
    assert "'n'" in str(info.value)


def test_load_reports_syntax_error_line(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{\n  "n": 2,\n  "kind": \n}\n')
    with pytest.raises(InstanceParseError) as info:
        load_instance(path)
    assert info.value.line == 4


def test_load_rejects_unordered_pairs(tmp_path):
    path = tmp_path / 'pairs.json'
    path.write_text(json.dumps({
        'n': 2, 'kind': {'type': 'generic'}, 'seed': 0,
        'diag': [0, 0], 'linear': [0, 0], 'quad': [{'i': 1, 'j': 0, 'w': 1.0}],
    }))
    with pytest.raises(InstanceParseError) as info:
        load_instance(path)
    assert info.value.field.startswith('quad')


def test_hand_written_instance(tmp_path):
    path = tmp_path / 'hand.json'
    path.write_text(json.dumps({
        'n': 2, 'kind': {'type': 'generic'}, 'seed': 0,
        'diag': [0.0, 0.0], 'linear': [-1.0, -1.0], 'quad': [{'i': 0, 'j': 1, 'w': 1.0}],
    }))
    oracle = brute_force(load_instance(path))
    assert oracle.optimal_value == -1.0
    assert oracle.optimal_bitstrings == ['01', '10']
