import numpy as np

from qgoa.observables import Observable
from qgoa.simulator.circuit import Circuit, run_circuit
from qgoa.simulator.gates import BoundAngle, gate_matrix, generator_matrix
from qgoa.simulator.statevector import apply_matrix, apply_observable, expectation
from qgoa.type_aliases import ParamArray


def adjoint_gradient(circuit: Circuit, obs: Observable, params: ParamArray) -> np.ndarray:
    """
    Exact gradient of <obs> by one forward and one reverse sweep

    A bound gate U = exp(-i s theta / 2 G) contributes s * Im<lambda|G|phi>, where phi is the state right
    after the gate and lambda is obs|psi> pulled back to the same point. Shared parameters accumulate.
    """
    return value_and_adjoint_gradient(circuit, obs, params)[1]


def value_and_adjoint_gradient(circuit: Circuit, obs: Observable, params: ParamArray) -> tuple[float, np.ndarray]:
    """<obs> and its adjoint gradient from the same forward pass"""
    params = circuit.check_params(params)
    angles = circuit.bind(params)

    phi = run_circuit(circuit, params)
    value = expectation(phi, obs)
    lam = apply_observable(phi, obs)
    grad = np.zeros(circuit.n_params, dtype=np.float64)

    for gate, angle in zip(reversed(circuit.gates), reversed(angles)):
        if isinstance(gate.slot, BoundAngle):
            mu = apply_matrix(phi, gate.qubits, generator_matrix(gate.kind))
            grad[gate.slot.param_index] += gate.slot.scale * np.vdot(lam.amplitudes, mu.amplitudes).imag
        inverse = gate_matrix(gate.kind, angle).conj().T
        phi = apply_matrix(phi, gate.qubits, inverse)
        lam = apply_matrix(lam, gate.qubits, inverse)

    return value, grad


def energy(circuit: Circuit, obs: Observable, params: ParamArray) -> float:
    """<obs> on the circuit output"""
    return expectation(run_circuit(circuit, params), obs)

