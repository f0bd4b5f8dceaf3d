import logging

import numpy as np

from qgoa.errors import ConsistencyError
from qgoa.observables import Observable, PauliString
from qgoa.simulator import kernels
from qgoa.simulator.gates import PAULIS, Gate, gate_matrix
from qgoa.type_aliases import Distribution, StateArray

logger = logging.getLogger(__name__)

# Registers above this size are refused
MAX_QUBITS = 24

# Expectations with a larger imaginary part mean a bug, not rounding
IMAGINARY_TOLERANCE = 1e-10


class StateVector:
    """The 2^n complex amplitudes of an n-qubit register (qubit 0 is the least significant bit)."""

    n_qubits: int
    amplitudes: StateArray

    def __init__(self, n_qubits: int, amplitudes: StateArray):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f'Register size {n_qubits} must lie in [1, {MAX_QUBITS}]')
        amplitudes = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.shape != (2 ** n_qubits,):
            raise ValueError(f'Expected {2 ** n_qubits} amplitudes for {n_qubits} qubits, got {amplitudes.shape[0]}')
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def __repr__(self) -> str:
        return f'StateVector(n_qubits={self.n_qubits})'

    @property
    def norm(self) -> float:
        """Euclidean norm of the amplitudes"""
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> 'StateVector':
        """Independent copy of the state"""
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def inner(self, other: 'StateVector') -> complex:
        """<self|other>"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def init_basis(n: int, bits: str) -> StateVector:
    """Computational basis state; `bits` lists the most significant qubit first"""
    if len(bits) != n or any(c not in '01' for c in bits):
        raise ValueError(f'Bitstring {bits!r} is not a {n}-bit string')
    amplitudes = np.zeros(2 ** n, dtype=np.complex128)
    amplitudes[int(bits, 2)] = 1.0
    return StateVector(n, amplitudes)


def init_plus(n: int) -> StateVector:
    """Uniform superposition |+>^n"""
    if n < 1:
        raise ValueError(f'Register size {n} must be positive')
    return StateVector(n, np.full(2 ** n, 2 ** (-n / 2), dtype=np.complex128))


def apply_matrix(state: StateVector, qubits: tuple[int, ...], matrix: np.ndarray) -> StateVector:
    """Apply a 1- or 2-qubit operator (np.kron ordering over `qubits`)"""
    if len(qubits) == 1:
        amplitudes = kernels.apply_single_qubit_matrix(state.amplitudes, state.n_qubits, qubits[0], matrix)
    elif len(qubits) == 2:
        amplitudes = kernels.apply_two_qubit_matrix(state.amplitudes, state.n_qubits, *qubits, matrix)
    else:
        raise ValueError(f'Only 1- and 2-qubit operators are supported, got qubits {qubits}')
    return StateVector(state.n_qubits, amplitudes)


def apply_gate(state: StateVector, gate: Gate, angle: float = 0.0) -> StateVector:
    """Apply a gate at the given angle"""
    if not np.isfinite(angle):
        raise ValueError(f'Angle {angle} for {gate.kind.value} is not finite')
    return apply_matrix(state, gate.qubits, gate_matrix(gate.kind, angle))


def apply_pauli(state: StateVector, pauli: PauliString) -> StateVector:
    """P|psi> including the coefficient"""
    amplitudes = state.amplitudes
    for qubit, letter in pauli.ops:
        amplitudes = kernels.apply_single_qubit_matrix(amplitudes, state.n_qubits, qubit, PAULIS[letter])
    return StateVector(state.n_qubits, pauli.coefficient * amplitudes)


def apply_observable(state: StateVector, obs: Observable) -> StateVector:
    """O|psi> including the constant"""
    _check_sizes(state, obs)
    if obs.is_diagonal:
        return StateVector(state.n_qubits, kernels.apply_diagonal(state.amplitudes, obs.diagonal()))
    amplitudes = obs.constant * state.amplitudes
    for term in obs.terms:
        amplitudes = amplitudes + apply_pauli(state, term).amplitudes
    return StateVector(state.n_qubits, amplitudes)


def _check_sizes(state: StateVector, obs: Observable) -> None:
    if state.n_qubits != obs.n_qubits:
        raise ValueError(f'Observable on {obs.n_qubits} qubits cannot be measured on {state.n_qubits} qubits')


def expectation(state: StateVector, obs: Observable) -> float:
    """<psi|O|psi>, evaluated term by term (or via the diagonal for Z-only observables)"""
    _check_sizes(state, obs)
    if obs.is_diagonal:
        return float(np.dot(np.abs(state.amplitudes) ** 2, obs.diagonal()))

    value = complex(obs.constant) * np.vdot(state.amplitudes, state.amplitudes)
    for term in obs.terms:
        value += np.vdot(state.amplitudes, apply_pauli(state, term).amplitudes)
    if abs(value.imag) > IMAGINARY_TOLERANCE:
        raise ConsistencyError(f'Expectation has imaginary part {value.imag:.3e}')
    return float(value.real)


def probability_array(state: StateVector) -> np.ndarray:
    """|amplitude|^2 indexed by basis index"""
    return np.abs(state.amplitudes) ** 2


def probabilities(state: StateVector) -> Distribution:
    """Exact measurement distribution over bitstrings with nonzero probability"""
    probs = probability_array(state)
    return {
        format(int(index), f'0{state.n_qubits}b'): float(probs[index])
        for index in np.flatnonzero(probs)
    }
