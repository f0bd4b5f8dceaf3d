import logging
from collections import defaultdict
from enum import Enum
from functools import reduce
from typing import Iterable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from qgoa.problems import GraphInstance, QuboInstance, adjacency_graph, portfolio_data
from qgoa.simulator import kernels
from qgoa.simulator.gates import IDENTITY, PAULIS
from qgoa.type_aliases import DenseMatrix

logger = logging.getLogger(__name__)

# Dense matrices are only built for verification
DENSE_MAX_QUBITS = 10

PauliLetter = Literal['X', 'Y', 'Z']


class SpinConvention(str, Enum):
    """How a decision bit x_i maps onto the Z eigenvalue of qubit i."""

    # x = (Z + 1) / 2: x = 1 is the qubit state |0>
    ZERO_IS_PLUS_ONE = 'zero_is_plus_one'
    # x = (1 - Z) / 2: x = 1 is the qubit state |1>
    ONE_IS_PLUS_ONE = 'one_is_plus_one'

    @property
    def z_slope(self) -> float:
        """beta in x = 1/2 + beta Z"""
        return 0.5 if self is SpinConvention.ZERO_IS_PLUS_ONE else -0.5

    def decode(self, qubit_bits: str) -> str:
        """Decision bitstring of a measured qubit bitstring"""
        if self is SpinConvention.ONE_IS_PLUS_ONE:
            return qubit_bits
        return qubit_bits.translate(_FLIP)

    def encode(self, bits: str) -> str:
        """Qubit bitstring that encodes a decision bitstring"""
        # both maps are involutions
        return self.decode(bits)


_FLIP = str.maketrans('01', '10')


class PauliString(BaseModel):
    """A real-weighted tensor product of Pauli operators; identity on unlisted qubits."""

    model_config = ConfigDict(frozen=True)

    ops: tuple[tuple[int, PauliLetter], ...] = ()
    coefficient: float = 1.0

    @field_validator('ops', mode='before')
    @classmethod
    def canonical_ops(cls, value):
        """Accept a {qubit: letter} map and store it sorted by qubit."""
        if isinstance(value, dict):
            value = value.items()
        ops = sorted((int(q), p) for q, p in value)
        qubits = [q for q, _ in ops]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f'Repeated qubit in Pauli string {ops}')
        if any(q < 0 for q in qubits):
            raise ValueError(f'Negative qubit index in Pauli string {ops}')
        return tuple(ops)

    @classmethod
    def from_label(cls, label: str, coefficient: float = 1.0) -> 'PauliString':
        """Parse labels such as 'X0 X1' or 'Z3'; the empty label is the identity"""
        return cls(ops={int(token[1:]): token[0] for token in label.split()}, coefficient=coefficient)

    @property
    def op_map(self) -> dict[int, str]:
        """{qubit: letter}"""
        return dict(self.ops)

    @property
    def is_diagonal(self) -> bool:
        """Whether the string contains only Z factors"""
        return all(p == 'Z' for _, p in self.ops)

    @property
    def max_qubit(self) -> int:
        """Largest qubit index acted on, -1 for the identity"""
        return max((q for q, _ in self.ops), default=-1)

    def label(self) -> str:
        """Inverse of from_label"""
        return ' '.join(f'{p}{q}' for q, p in self.ops)


class Observable(BaseModel):
    """A Hermitian operator: a real combination of Pauli strings plus a constant."""

    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(ge=1)
    terms: tuple[PauliString, ...] = ()
    constant: float = 0.0

    _diagonal: Optional[np.ndarray] = PrivateAttr(None)

    @model_validator(mode='before')
    @classmethod
    def merge_terms(cls, data):
        """Merge terms with identical operators and fold identities into the constant."""
        if not isinstance(data, dict) or 'terms' not in data:
            return data
        merged: dict[tuple, float] = defaultdict(float)
        constant = float(data.get('constant', 0.0))
        for term in data['terms']:
            if not isinstance(term, PauliString):
                term = PauliString.model_validate(term)
            if not term.ops:
                constant += term.coefficient
            else:
                merged[term.ops] += term.coefficient
        terms = tuple(
            PauliString(ops=ops, coefficient=coefficient)
            for ops, coefficient in sorted(merged.items(), key=lambda item: (len(item[0]), item[0]))
            if coefficient != 0.0
        )
        return {**data, 'terms': terms, 'constant': constant}

    @model_validator(mode='after')
    def check_size(self) -> 'Observable':
        """Every term must fit the register."""
        for term in self.terms:
            if term.max_qubit >= self.n_qubits:
                raise ValueError(f'Term {term.label()} acts outside a {self.n_qubits}-qubit register')
        return self

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[str, float]], constant: float = 0.0) -> 'Observable':
        """Build from (label, coefficient) pairs"""
        return cls(
            n_qubits=n_qubits,
            terms=[PauliString.from_label(label, coefficient) for label, coefficient in terms],
            constant=constant,
        )

    def __add__(self, other: 'Observable') -> 'Observable':
        if other.n_qubits != self.n_qubits:
            raise ValueError(f'Cannot add observables on {self.n_qubits} and {other.n_qubits} qubits')
        return Observable(
            n_qubits=self.n_qubits,
            terms=self.terms + other.terms,
            constant=self.constant + other.constant,
        )

    def scaled(self, factor: float) -> 'Observable':
        """The observable multiplied by a real factor"""
        return Observable(
            n_qubits=self.n_qubits,
            terms=[PauliString(ops=t.ops, coefficient=factor * t.coefficient) for t in self.terms],
            constant=factor * self.constant,
        )

    def coefficient(self, label: str) -> float:
        """Coefficient of the term with the given label, 0 if absent"""
        ops = PauliString.from_label(label).ops
        return next((t.coefficient for t in self.terms if t.ops == ops), 0.0)

    @property
    def is_diagonal(self) -> bool:
        """Whether every term is a product of Z operators"""
        return all(term.is_diagonal for term in self.terms)

    def diagonal(self) -> np.ndarray:
        """Eigenvalue on every basis state, for Z-only observables"""
        if not self.is_diagonal:
            raise ValueError('Observable has X or Y terms and is not diagonal')
        if self._diagonal is None:
            values = np.full(2 ** self.n_qubits, self.constant, dtype=np.float64)
            for term in self.terms:
                values += term.coefficient * kernels.z_parity(self.n_qubits, *(q for q, _ in term.ops))
            values.setflags(write=False)
            self._diagonal = values
        return self._diagonal


class CompiledObservable(BaseModel):
    """A problem observable with the offset and spin convention it was compiled under."""

    model_config = ConfigDict(frozen=True)

    observable: Observable
    offset: float
    convention: SpinConvention

    @property
    def n_qubits(self) -> int:
        """Register size"""
        return self.observable.n_qubits

    def value(self, bits: str) -> float:
        """<x|M|x> + offset for a decision bitstring x (most significant variable first)"""
        qubit_index = int(self.convention.encode(bits), 2)
        return float(self.observable.diagonal()[qubit_index]) + self.offset

    def decode(self, qubit_bits: str) -> str:
        """Decision bitstring read from a measured qubit bitstring"""
        return self.convention.decode(qubit_bits)

    def encode(self, bits: str) -> str:
        """Qubit bitstring encoding a decision bitstring"""
        return self.convention.encode(bits)


def _compile_quadratic(
    n: int,
    linear: Iterable[float],
    pairs: Iterable[tuple[int, int, float]],
    constant: float,
    conv: SpinConvention,
) -> CompiledObservable:
    """
    Substitute x_i = 1/2 + beta Z_i into sum_i c_i x_i + sum_pairs q_ij x_i x_j + constant

    Returns the Z/ZZ observable and the offset holding every constant.
    """
    beta = conv.z_slope
    offset = constant
    terms = []
    for i, c in enumerate(linear):
        offset += 0.5 * c
        terms.append(PauliString(ops={i: 'Z'}, coefficient=beta * c))
    for i, j, q in pairs:
        offset += 0.25 * q
        terms.append(PauliString(ops={i: 'Z'}, coefficient=0.5 * beta * q))
        terms.append(PauliString(ops={j: 'Z'}, coefficient=0.5 * beta * q))
        terms.append(PauliString(ops={i: 'Z', j: 'Z'}, coefficient=beta * beta * q))
    observable = Observable(n_qubits=n, terms=terms)
    # the observable itself carries no constant; all of it lives in the offset
    return CompiledObservable(observable=observable, offset=offset + observable.constant, convention=conv)


def qubo_to_observable(
    instance: QuboInstance,
    conv: SpinConvention = SpinConvention.ZERO_IS_PLUS_ONE,
) -> CompiledObservable:
    """Ising observable whose basis expectations plus offset reproduce the QUBO objective"""
    return _compile_quadratic(
        instance.n,
        linear=[d + b for d, b in zip(instance.diag, instance.linear)],
        pairs=[(i, j, 2.0 * w) for i, j, w in instance.pairs],
        constant=instance.constant,
        conv=conv,
    )


def portfolio_observable(
    covariance: np.ndarray,
    returns: np.ndarray,
    lam: float,
    conv: SpinConvention = SpinConvention.ZERO_IS_PLUS_ONE,
) -> CompiledObservable:
    """Observable of lambda x^T V x - (1 - lambda) mu^T x with both (i, j) and (j, i) pairs merged"""
    covariance = np.asarray(covariance, dtype=np.float64)
    returns = np.asarray(returns, dtype=np.float64)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f'lambda {lam} must lie in [0, 1]')
    n = returns.shape[0]
    if covariance.shape != (n, n):
        raise ValueError(f'Covariance of shape {covariance.shape} does not match {n} returns')
    if not np.allclose(covariance, covariance.T, rtol=0.0, atol=1e-12):
        raise ValueError('Covariance matrix must be symmetric')

    linear = [lam * covariance[i, i] - (1.0 - lam) * returns[i] for i in range(n)]
    pairs = [
        (i, j, 2.0 * lam * covariance[i, j])
        for i in range(n) for j in range(i + 1, n)
        if covariance[i, j] != 0.0 and lam != 0.0
    ]
    return _compile_quadratic(n, linear, pairs, 0.0, conv)


def mvc_observable(
    graph: GraphInstance,
    b: float = 1.0,
    conv: SpinConvention = SpinConvention.ONE_IS_PLUS_ONE,
) -> CompiledObservable:
    """
    Observable of sum over edges of (1 - x_i)(1 - x_j) plus b per chosen vertex

    Edge weights are ignored, only the edge set matters. Under ONE_IS_PLUS_ONE with b = 1 the terms are
    sum_E (Z_i + Z_j + Z_i Z_j) / 4 - sum_V Z_i / 2, with the dropped constants kept in the offset.
    """
    linear = [b] * graph.n
    pairs = []
    for i, j, _ in graph.sorted_edges:
        linear[i] -= 1.0
        linear[j] -= 1.0
        pairs.append((i, j, 1.0))
    return _compile_quadratic(graph.n, linear, pairs, float(len(pairs)), conv)


def compile_instance(instance: QuboInstance) -> CompiledObservable:
    """Problem observable for an instance, using the encoding its kind calls for"""
    if instance.kind.type == 'mvc':
        b = instance.kind.b if instance.kind.b is not None else 1.0
        return mvc_observable(adjacency_graph(instance), b)
    if instance.kind.type == 'portfolio' and instance.kind.lambda_ not in (None, 0.0, 1.0):
        covariance, returns, lam = portfolio_data(instance)
        return portfolio_observable(covariance, returns, lam)
    return qubo_to_observable(instance)


def build_ht_observable(graph: GraphInstance) -> Observable:
    """The XY graph Hamiltonian sum_E E_ij (X_i X_j + Y_i Y_j) - sum_V E_ii Z_i"""
    terms = []
    for i, j, w in graph.sorted_edges:
        terms.append(PauliString(ops={i: 'X', j: 'X'}, coefficient=w))
        terms.append(PauliString(ops={i: 'Y', j: 'Y'}, coefficient=w))
    for i, w in enumerate(graph.vertex_weights):
        if w != 0.0:
            terms.append(PauliString(ops={i: 'Z'}, coefficient=-w))
    return Observable(n_qubits=graph.n, terms=terms)


def mixer_observable(n: int) -> Observable:
    """The transverse-field mixer sum_i X_i"""
    return Observable(n_qubits=n, terms=[PauliString(ops={i: 'X'}) for i in range(n)])


def _check_dense(n: int) -> None:
    if n > DENSE_MAX_QUBITS:
        raise ValueError(f'Dense matrices are limited to {DENSE_MAX_QUBITS} qubits, got {n}')


def _embed(n: int, factors: dict[int, np.ndarray]) -> DenseMatrix:
    """Kronecker product with qubit 0 as the least significant factor"""
    return reduce(np.kron, [factors.get(q, IDENTITY) for q in reversed(range(n))], np.ones((1, 1), np.complex128))


def pauli_matrix(pauli: PauliString, n: int) -> DenseMatrix:
    """Dense matrix of one Pauli string, coefficient included"""
    _check_dense(n)
    return pauli.coefficient * _embed(n, {q: PAULIS[p] for q, p in pauli.ops})


def observable_matrix(obs: Observable, n: Optional[int] = None) -> DenseMatrix:
    """Dense matrix of an observable by Kronecker expansion"""
    n = obs.n_qubits if n is None else n
    if n < obs.n_qubits:
        raise ValueError(f'Observable needs {obs.n_qubits} qubits, got {n}')
    _check_dense(n)
    matrix = obs.constant * np.eye(2 ** n, dtype=np.complex128)
    for term in obs.terms:
        matrix += pauli_matrix(term, n)
    return matrix


def build_projector_matrix(graph: GraphInstance, n: Optional[int] = None) -> DenseMatrix:
    """
    Dense connection matrix in projector form

    sum_E E_ij (|1><0|_i |0><1|_j + |0><1|_i |1><0|_j) + sum_V E_ii |1><1|_i
    """
    n = graph.n if n is None else n
    if n < graph.n:
        raise ValueError(f'Graph needs {graph.n} qubits, got {n}')
    _check_dense(n)
    lower = np.array([[0, 0], [1, 0]], dtype=np.complex128)  # |1><0|
    raise_ = lower.conj().T  # |0><1|
    excited = np.array([[0, 0], [0, 1]], dtype=np.complex128)  # |1><1|

    matrix = np.zeros((2 ** n, 2 ** n), dtype=np.complex128)
    for i, j, w in graph.sorted_edges:
        matrix += w * (_embed(n, {i: lower, j: raise_}) + _embed(n, {i: raise_, j: lower}))
    for i, w in enumerate(graph.vertex_weights):
        if w != 0.0:
            matrix += w * _embed(n, {i: excited})
    return matrix


def commutes(a: PauliString, b: PauliString) -> bool:
    """Whether two Pauli strings commute: an even number of sites carry different non-identity letters"""
    ops_b = b.op_map
    clashes = sum(1 for q, p in a.ops if q in ops_b and ops_b[q] != p)
    return clashes % 2 == 0
