import logging
from enum import Enum
from functools import reduce
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qgoa.simulator.gates import Gate, gate_matrix
from qgoa.simulator.statevector import StateVector, apply_gate, init_basis, init_plus
from qgoa.type_aliases import DenseMatrix, ParamArray

logger = logging.getLogger(__name__)


class InitialState(str, Enum):
    """Register preparation before the first gate."""

    ALL_ZERO = 'all_zero'
    ALL_PLUS = 'all_plus'


class ParamRole(str, Enum):
    """What a free parameter drives."""

    THETA_Y = 'theta_y'
    THETA_Z = 'theta_z'
    ETA = 'eta'
    GAMMA = 'gamma'
    BETA = 'beta'


class ParamLabel(BaseModel):
    """Role of one free parameter, with its layer and (for single-qubit angles) qubit."""

    model_config = ConfigDict(frozen=True)

    role: ParamRole
    layer: int = Field(ge=0)
    qubit: Optional[int] = None

    def __str__(self) -> str:
        suffix = f',{self.qubit}' if self.qubit is not None else ''
        return f'{self.role.value}[{self.layer}{suffix}]'


class ParamLayout(BaseModel):
    """The ordered free parameters of a circuit."""

    model_config = ConfigDict(frozen=True)

    labels: tuple[ParamLabel, ...] = ()

    @property
    def n_params(self) -> int:
        """Number of free parameters"""
        return len(self.labels)

    def indices(self, role: ParamRole) -> list[int]:
        """Positions of every parameter with the given role"""
        return [index for index, label in enumerate(self.labels) if label.role is role]


class Circuit(BaseModel):
    """An ordered gate list over a fixed register, with the number of free parameters it reads."""

    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(ge=1)
    gates: tuple[Gate, ...] = ()
    initial_state: InitialState = InitialState.ALL_ZERO
    n_params: int = Field(0, ge=0)

    @model_validator(mode='after')
    def check_gates(self) -> 'Circuit':
        """Qubits must fit the register and bound indices the parameter vector."""
        for position, gate in enumerate(self.gates):
            if max(gate.qubits) >= self.n_qubits:
                raise ValueError(f'Gate {position} on {gate.qubits} exceeds the {self.n_qubits}-qubit register')
            if gate.param_index is not None and gate.param_index >= self.n_params:
                raise ValueError(f'Gate {position} reads parameter {gate.param_index} of only {self.n_params}')
        return self

    def check_params(self, params: ParamArray) -> np.ndarray:
        """Validate a parameter vector against the circuit"""
        params = np.asarray(params, dtype=np.float64).reshape(-1)
        if params.shape[0] != self.n_params:
            raise ValueError(f'Circuit takes {self.n_params} parameters, got {params.shape[0]}')
        return params

    def bind(self, params: ParamArray) -> list[float]:
        """Resolved angle of every gate, in order"""
        params = self.check_params(params)
        return [gate.resolve_angle(params) for gate in self.gates]

    def initial(self) -> StateVector:
        """The prepared register before any gate"""
        if self.initial_state is InitialState.ALL_PLUS:
            return init_plus(self.n_qubits)
        return init_basis(self.n_qubits, '0' * self.n_qubits)

    def then(self, *gates: Gate) -> 'Circuit':
        """A copy with gates appended"""
        return self.model_copy(update={'gates': self.gates + tuple(gates)})

    def permuted(self, order: list[int]) -> 'Circuit':
        """A copy with the gates reordered by position list"""
        if sorted(order) != list(range(len(self.gates))):
            raise ValueError('Order must be a permutation of gate positions')
        return self.model_copy(update={'gates': tuple(self.gates[i] for i in order)})


def run_circuit(circuit: Circuit, params: ParamArray) -> StateVector:
    """Prepare the initial state and apply every gate with bound angles resolved"""
    params = circuit.check_params(params)
    state = circuit.initial()
    for gate in circuit.gates:
        state = apply_gate(state, gate, gate.resolve_angle(params))
    return state


def embed_gate(gate: Gate, angle: float, n_qubits: int) -> DenseMatrix:
    """Full-register matrix of one gate, for dense verification"""
    matrix = gate_matrix(gate.kind, angle)
    if len(gate.qubits) == 2:
        q1, q2 = gate.qubits
        # build with the pair as the leading factors, then reorder tensor axes into register order
        full = np.kron(matrix, np.eye(2 ** (n_qubits - 2), dtype=np.complex128))
        tensor = full.reshape([2] * (2 * n_qubits))
        others = [q for q in reversed(range(n_qubits)) if q not in (q1, q2)]
        # axes of `full` list (q1, q2, others...) most significant first
        current = [q1, q2] + others
        target = list(reversed(range(n_qubits)))
        perm = [current.index(q) for q in target]
        tensor = tensor.transpose(perm + [n_qubits + p for p in perm])
        return tensor.reshape(2 ** n_qubits, 2 ** n_qubits)
    factors = [matrix if q == gate.qubits[0] else np.eye(2, dtype=np.complex128) for q in reversed(range(n_qubits))]
    return reduce(np.kron, factors)


def dense_circuit_unitary(circuit: Circuit, params: ParamArray) -> DenseMatrix:
    """The circuit's full unitary (gates only, preparation excluded), limited to 10 qubits"""
    if circuit.n_qubits > 10:
        raise ValueError(f'Dense unitaries are limited to 10 qubits, got {circuit.n_qubits}')
    unitary = np.eye(2 ** circuit.n_qubits, dtype=np.complex128)
    for gate, angle in zip(circuit.gates, circuit.bind(params)):
        unitary = embed_gate(gate, angle, circuit.n_qubits) @ unitary
    return unitary
