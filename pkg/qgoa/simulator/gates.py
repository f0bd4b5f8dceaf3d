from enum import Enum
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

IDENTITY = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)

PAULIS = {'X': PAULI_X, 'Y': PAULI_Y, 'Z': PAULI_Z}


class GateKind(str, Enum):
    """Supported gate kinds."""

    RX = 'RX'
    RY = 'RY'
    RZ = 'RZ'
    H = 'H'
    X = 'X'
    XX = 'XX'
    YY = 'YY'
    ZZ = 'ZZ'

    @property
    def arity(self) -> int:
        """Number of qubits the gate acts on"""
        return 2 if self in TWO_QUBIT_KINDS else 1

    @property
    def parameterized(self) -> bool:
        """Whether the gate is a rotation exp(-i angle/2 G)"""
        return self in GENERATORS


TWO_QUBIT_KINDS = frozenset({GateKind.XX, GateKind.YY, GateKind.ZZ})

# Every generator squares to the identity, so exp(-i a/2 G) = cos(a/2) I - i sin(a/2) G
GENERATORS = {
    GateKind.RX: PAULI_X,
    GateKind.RY: PAULI_Y,
    GateKind.RZ: PAULI_Z,
    GateKind.XX: np.kron(PAULI_X, PAULI_X),
    GateKind.YY: np.kron(PAULI_Y, PAULI_Y),
    GateKind.ZZ: np.kron(PAULI_Z, PAULI_Z),
}

FIXED_MATRICES = {
    GateKind.H: HADAMARD,
    GateKind.X: PAULI_X,
}


class FixedAngle(BaseModel):
    """A constant rotation angle in radians."""

    model_config = ConfigDict(frozen=True)

    type: Literal['fixed'] = 'fixed'
    angle: float = Field(0.0, allow_inf_nan=False)


class BoundAngle(BaseModel):
    """An angle equal to scale * params[param_index]."""

    model_config = ConfigDict(frozen=True)

    type: Literal['bound'] = 'bound'
    param_index: int = Field(ge=0)
    scale: float = Field(1.0, allow_inf_nan=False)


AngleSlot = Union[FixedAngle, BoundAngle]


class Gate(BaseModel):
    """One gate of a circuit, with its angle either fixed or bound to a free parameter."""

    model_config = ConfigDict(frozen=True)

    kind: GateKind
    qubits: tuple[int, ...]
    slot: AngleSlot = Field(default_factory=FixedAngle)

    @model_validator(mode='after')
    def check_shape(self) -> 'Gate':
        """Match the qubit count to the kind and reject repeated qubits."""
        if len(self.qubits) != self.kind.arity:
            raise ValueError(f'{self.kind.value} acts on {self.kind.arity} qubit(s), got {self.qubits}')
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f'{self.kind.value} needs distinct qubits, got {self.qubits}')
        if any(q < 0 for q in self.qubits):
            raise ValueError(f'Negative qubit index in {self.qubits}')
        if not self.kind.parameterized and isinstance(self.slot, BoundAngle):
            raise ValueError(f'{self.kind.value} takes no angle')
        return self

    @property
    def param_index(self) -> Optional[int]:
        """Index of the bound parameter, None for fixed gates"""
        return self.slot.param_index if isinstance(self.slot, BoundAngle) else None

    def resolve_angle(self, params: np.ndarray) -> float:
        """Angle in radians for the given parameter vector"""
        if isinstance(self.slot, BoundAngle):
            return self.slot.scale * float(params[self.slot.param_index])
        return self.slot.angle


def rotation(kind: GateKind, qubits: tuple[int, ...], param_index: int, scale: float = 1.0) -> Gate:
    """Shorthand for a gate bound to a free parameter"""
    return Gate(kind=kind, qubits=qubits, slot=BoundAngle(param_index=param_index, scale=scale))


def fixed(kind: GateKind, qubits: tuple[int, ...], angle: float = 0.0) -> Gate:
    """Shorthand for a gate with a constant angle"""
    return Gate(kind=kind, qubits=qubits, slot=FixedAngle(angle=angle))


def gate_matrix(kind: GateKind, angle: float = 0.0) -> np.ndarray:
    """Unitary of a gate kind at the given angle (2x2 or 4x4, np.kron ordering)"""
    if kind in FIXED_MATRICES:
        return FIXED_MATRICES[kind]
    generator = GENERATORS[kind]
    identity = np.eye(generator.shape[0], dtype=np.complex128)
    return np.cos(angle / 2) * identity - 1j * np.sin(angle / 2) * generator


def generator_matrix(kind: GateKind) -> np.ndarray:
    """The Hermitian generator G of exp(-i angle/2 G)"""
    if kind not in GENERATORS:
        raise ValueError(f'{kind.value} has no generator')
    return GENERATORS[kind]
