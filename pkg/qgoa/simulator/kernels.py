import numpy as np

from qgoa.type_aliases import StateArray


def check_qubits(n_qubits: int, *qubits: int) -> None:
    """Raise if any qubit index falls outside the register or repeats"""
    for qubit in qubits:
        if not 0 <= qubit < n_qubits:
            raise ValueError(f'Qubit {qubit} is out of range for a {n_qubits}-qubit register')
    if len(set(qubits)) != len(qubits):
        raise ValueError(f'Qubits {qubits} must be distinct')


def conv_state_to_qubit_view(amplitudes: StateArray, n_qubits: int, qubit: int) -> StateArray:
    """
    Reshape amplitudes into (high block, qubit bit, low block)

    Axis 1 indexes the value of `qubit`, so a 2x2 operator contracts against it.
    """
    return amplitudes.reshape(2 ** (n_qubits - qubit - 1), 2, 2 ** qubit)


def conv_state_to_pair_view(amplitudes: StateArray, n_qubits: int, qubit1: int, qubit2: int) -> StateArray:
    """
    Reshape amplitudes into (high block, high bit, middle block, low bit, low block)

    Axis 1 indexes the larger qubit index and axis 3 the smaller one.
    """
    high, low = max(qubit1, qubit2), min(qubit1, qubit2)
    return amplitudes.reshape(
        2 ** (n_qubits - high - 1), 2,
        2 ** (high - low - 1), 2,
        2 ** low,
    )


def apply_single_qubit_matrix(
    amplitudes: StateArray,
    n_qubits: int,
    qubit: int,
    matrix: np.ndarray,
) -> StateArray:
    """Apply a 2x2 operator to one qubit, returning new amplitudes"""
    check_qubits(n_qubits, qubit)
    tensor = conv_state_to_qubit_view(amplitudes, n_qubits, qubit)
    return np.einsum('ab,ibk->iak', matrix, tensor).reshape(-1)


def apply_two_qubit_matrix(
    amplitudes: StateArray,
    n_qubits: int,
    qubit1: int,
    qubit2: int,
    matrix: np.ndarray,
) -> StateArray:
    """
    Apply a 4x4 operator to a qubit pair, returning new amplitudes

    The operator's basis is |b1 b2> with b1 the bit of `qubit1`, i.e. the order of np.kron(A1, A2).
    """
    check_qubits(n_qubits, qubit1, qubit2)
    tensor = conv_state_to_pair_view(amplitudes, n_qubits, qubit1, qubit2)
    # gate axes are (out first, out second, in first, in second)
    gate = matrix.reshape(2, 2, 2, 2)
    if qubit1 < qubit2:
        # view axis 1 holds qubit2, so swap the roles of the two factors
        gate = gate.transpose(1, 0, 3, 2)
    return np.einsum('abcd,icjdk->iajbk', gate, tensor).reshape(-1)


def apply_diagonal(amplitudes: StateArray, diagonal: np.ndarray) -> StateArray:
    """Multiply amplitudes elementwise by a full-register diagonal"""
    if diagonal.shape != amplitudes.shape:
        raise ValueError(f'Diagonal of shape {diagonal.shape} does not match state of shape {amplitudes.shape}')
    return amplitudes * diagonal


def z_parity(n_qubits: int, *qubits: int) -> np.ndarray:
    """Eigenvalues (+1/-1) of the product of Z on `qubits` for every basis index"""
    check_qubits(n_qubits, *qubits)
    index = np.arange(2 ** n_qubits)
    parity = np.zeros(2 ** n_qubits, dtype=np.int64)
    for qubit in qubits:
        parity ^= (index >> qubit) & 1
    return 1.0 - 2.0 * parity
