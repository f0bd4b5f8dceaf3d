import numpy as np
import pytest

from qgoa.ansatz import build_qgoa
from qgoa.errors import NonFiniteError
from qgoa.observables import Observable, compile_instance
from qgoa.optimizer import (
    AdamConfig,
    AdamState,
    GradientEngine,
    adam_minimize,
    adam_step,
    evaluate,
    init_params,
)
from qgoa.problems import aggregation_graph, brute_force
from qgoa.simulator.circuit import Circuit, ParamLabel, ParamLayout, ParamRole, run_circuit
from qgoa.simulator.gates import GateKind, rotation
from qgoa.simulator.statevector import expectation

Z0 = Observable.from_terms(1, [('Z0', 1.0)])
RY_CIRCUIT = Circuit(n_qubits=1, gates=(rotation(GateKind.RY, (0,), 0),), n_params=1)


def test_init_params():
    layout = ParamLayout(labels=tuple(ParamLabel(role=ParamRole.ETA, layer=i) for i in range(38)))
    a, b = init_params(layout, seed=3), init_params(layout, seed=3)
    assert a.shape == (38,)
    assert np.array_equal(a, b)
    assert np.all((a > -np.pi) & (a < np.pi))
    assert not np.array_equal(a, init_params(layout, seed=4))


def test_config_validation():
    with pytest.raises(ValueError):
        AdamConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        AdamConfig(window=0)
    with pytest.raises(ValueError):
        AdamConfig(beta1=1.0)


def test_adam_step_first_move_is_learning_rate():
    cfg = AdamConfig(learning_rate=0.1)
    state = AdamState(2)
    params = adam_step(np.zeros(2), np.array([3.0, -0.5]), state, cfg)
    assert np.allclose(params, [-0.1, 0.1], atol=1e-6)
    assert state.t == 1


def test_ry_converges_to_minus_one():
    cfg = AdamConfig(max_iters=2000)
    trace = adam_minimize(RY_CIRCUIT, Z0, np.array([0.1]), cfg)
    assert trace.final_loss == pytest.approx(-1.0, abs=1e-4)
    assert abs(abs(trace.final_params[0]) - np.pi) < 2e-2
    assert len(trace.losses) <= cfg.max_iters
    assert trace.converged_at is not None and trace.converged_at <= len(trace.losses)


def test_constant_objective_converges_at_window():
    constant = Observable(n_qubits=1, constant=2.5)
    cfg = AdamConfig(window=10)
    trace = adam_minimize(RY_CIRCUIT, constant, np.array([0.4]), cfg)
    assert trace.converged_at == 10
    assert trace.losses == pytest.approx([2.5] * 10, abs=1e-12)


def test_small_learning_rate_is_monotone():
    trace = adam_minimize(RY_CIRCUIT, Z0, np.array([0.1]), AdamConfig(learning_rate=1e-3, max_iters=300, tol=0.0))
    losses = np.array(trace.losses)
    assert np.all(np.diff(losses[5:]) <= 1e-9)
    assert trace.converged_at is None
    assert trace.iterations == 300


def test_losses_include_offset_and_match_circuit(path_mvc):
    compiled = compile_instance(path_mvc)
    circuit, layout = build_qgoa(aggregation_graph(path_mvc), 1)
    seen = []
    cfg = AdamConfig(max_iters=5)
    trace = adam_minimize(circuit, compiled, init_params(layout, 0), cfg,
                          on_iteration=lambda i, loss, norm: seen.append((i, loss, norm)))
    assert [i for i, _, _ in seen] == list(range(5))
    assert [loss for _, loss, _ in seen] == trace.losses
    final = expectation(run_circuit(circuit, trace.final_params), compiled.observable) + compiled.offset
    assert trace.final_loss == pytest.approx(final, abs=1e-12)


def test_engines_agree(path_mvc):
    compiled = compile_instance(path_mvc)
    circuit, layout = build_qgoa(aggregation_graph(path_mvc), 1)
    params = init_params(layout, 1)
    adjoint_loss, adjoint_grad = evaluate(circuit, compiled, params, GradientEngine.ADJOINT)
    numeric_loss, numeric_grad = evaluate(circuit, compiled, params, GradientEngine.FINITE_DIFF)
    assert adjoint_loss == pytest.approx(numeric_loss, abs=1e-12)
    assert np.allclose(adjoint_grad, numeric_grad, atol=1e-8)


def test_deterministic(path_mvc):
    compiled = compile_instance(path_mvc)
    circuit, layout = build_qgoa(aggregation_graph(path_mvc), 2)
    runs = [adam_minimize(circuit, compiled, init_params(layout, 5), AdamConfig(max_iters=30)) for _ in range(2)]
    assert runs[0] == runs[1]


def test_non_finite_loss_aborts():
    nan_obs = Observable(n_qubits=1, constant=float('nan'))
    with pytest.raises(NonFiniteError) as info:
        adam_minimize(RY_CIRCUIT, nan_obs, np.array([0.1]))
    assert info.value.iteration == 0


def test_init_length_must_match():
    with pytest.raises(ValueError):
        adam_minimize(RY_CIRCUIT, Z0, np.array([0.1, 0.2]))


def test_path_cover_reaches_optimum(path_mvc):
    compiled = compile_instance(path_mvc)
    circuit, layout = build_qgoa(aggregation_graph(path_mvc), 2)
    trace = adam_minimize(circuit, compiled, init_params(layout, 0), AdamConfig(max_iters=300))
    optimum = brute_force(path_mvc).optimal_value
    assert trace.final_loss >= optimum - 1e-9
    assert trace.final_loss == pytest.approx(optimum, abs=1e-2)


def test_window_of_one_compares_two_losses():
    constant = Observable(n_qubits=1, constant=2.5)
    trace = adam_minimize(RY_CIRCUIT, constant, np.array([0.4]), AdamConfig(window=1))
    assert trace.converged_at == 2
