import logging
from enum import Enum
from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from qgoa.observables import Observable
from qgoa.problems import GraphInstance
from qgoa.simulator.circuit import Circuit, InitialState, ParamLabel, ParamLayout, ParamRole
from qgoa.simulator.gates import Gate, GateKind, fixed, rotation

logger = logging.getLogger(__name__)


class Algorithm(str, Enum):
    """Variational ansatz family."""

    QGOA = 'qgoa'
    QAOA = 'qaoa'


class ProblemType(str, Enum):
    """Benchmark problem family, as used by the closed-form cost model."""

    PORTFOLIO = 'portfolio'
    MVC = 'mvc'


class AggregationSplit(str, Enum):
    """Gate order inside the aggregation layer."""

    # every XX edge term, then every YY edge term: each block is mutually commuting
    BLOCK = 'block'
    # XX then YY edge by edge: the result depends on the edge order
    INTERLEAVED = 'interleaved'


class GateCounts(BaseModel):
    """Single- and two-qubit gate totals."""

    model_config = ConfigDict(frozen=True)

    singles: int = Field(0, ge=0)
    doubles: int = Field(0, ge=0)


def aggregation_gates(
    graph: GraphInstance,
    param_index: int,
    split: AggregationSplit = AggregationSplit.BLOCK,
) -> list[Gate]:
    """
    First-order evolution exp(-i eta H) of the XY graph Hamiltonian, all gates bound to one parameter

    Edges give XX and YY gates with scale 2 E_ij; vertices with E_ii != 0 give RZ with scale -2 E_ii.
    """
    edges = graph.sorted_edges
    if split is AggregationSplit.BLOCK:
        gates = [rotation(GateKind.XX, (i, j), param_index, 2.0 * w) for i, j, w in edges]
        gates += [rotation(GateKind.YY, (i, j), param_index, 2.0 * w) for i, j, w in edges]
    else:
        gates = [
            rotation(kind, (i, j), param_index, 2.0 * w)
            for i, j, w in edges
            for kind in (GateKind.XX, GateKind.YY)
        ]
    gates += [
        rotation(GateKind.RZ, (i,), param_index, -2.0 * w)
        for i, w in enumerate(graph.vertex_weights)
        if w != 0.0
    ]
    return gates


def aggregation_block(graph: GraphInstance, split: AggregationSplit = AggregationSplit.BLOCK) -> Circuit:
    """A one-parameter circuit holding only the aggregation layer"""
    return Circuit(n_qubits=graph.n, gates=tuple(aggregation_gates(graph, 0, split)), n_params=1)


def build_qgoa(
    graph: GraphInstance,
    layers: int,
    split: AggregationSplit = AggregationSplit.BLOCK,
    encoding: Optional[Sequence[float]] = None,
) -> tuple[Circuit, ParamLayout]:
    """
    Build the graph ansatz

    Per layer: RY on every qubit, RZ on every qubit, then the aggregation layer driven by one shared eta.
    `encoding` prepends fixed RY(x_i) feature-encoding gates.
    """
    if layers < 1:
        raise ValueError(f'Layer count {layers} must be at least 1')
    if not graph.edges and not any(graph.vertex_weights):
        raise ValueError('Graph has neither edges nor vertex weights to aggregate')
    if encoding is not None and len(encoding) != graph.n:
        raise ValueError(f'Expected {graph.n} encoding angles, got {len(encoding)}')

    n = graph.n
    gates: list[Gate] = [fixed(GateKind.RY, (i,), angle) for i, angle in enumerate(encoding or ())]
    labels: list[ParamLabel] = []

    for layer in range(layers):
        y_start = len(labels)
        labels += [ParamLabel(role=ParamRole.THETA_Y, layer=layer, qubit=i) for i in range(n)]
        z_start = len(labels)
        labels += [ParamLabel(role=ParamRole.THETA_Z, layer=layer, qubit=i) for i in range(n)]
        eta = len(labels)
        labels.append(ParamLabel(role=ParamRole.ETA, layer=layer))

        gates += [rotation(GateKind.RY, (i,), y_start + i) for i in range(n)]
        gates += [rotation(GateKind.RZ, (i,), z_start + i) for i in range(n)]
        gates += aggregation_gates(graph, eta, split)

    layout = ParamLayout(labels=tuple(labels))
    circuit = Circuit(n_qubits=n, gates=tuple(gates), n_params=layout.n_params)
    logger.debug("Built QGOA circuit: %s qubits, %s layers, %s gates", n, layers, len(gates))
    return circuit, layout


def build_qaoa(cost: Observable, layers: int) -> tuple[Circuit, ParamLayout]:
    """
    Build the alternating-operator ansatz from a Z/ZZ cost observable

    Per layer: a ZZ gate per coupling (scale 2 w_ij), an RZ on every qubit (scale 2 h_i, possibly zero),
    then RX mixers (scale 2). The register starts in |+>^n.
    """
    if layers < 1:
        raise ValueError(f'Layer count {layers} must be at least 1')
    fields: dict[int, float] = {}
    couplings: list[tuple[int, int, float]] = []
    for term in cost.terms:
        if not term.is_diagonal or len(term.ops) > 2:
            raise ValueError(f'Cost term {term.label()} is not a Z or ZZ term')
        qubits = [q for q, _ in term.ops]
        if len(qubits) == 1:
            fields[qubits[0]] = term.coefficient
        else:
            couplings.append((qubits[0], qubits[1], term.coefficient))

    n = cost.n_qubits
    gates: list[Gate] = []
    labels: list[ParamLabel] = []
    for layer in range(layers):
        gamma, beta = len(labels), len(labels) + 1
        labels += [ParamLabel(role=ParamRole.GAMMA, layer=layer), ParamLabel(role=ParamRole.BETA, layer=layer)]
        gates += [rotation(GateKind.ZZ, (i, j), gamma, 2.0 * w) for i, j, w in couplings]
        gates += [rotation(GateKind.RZ, (i,), gamma, 2.0 * fields.get(i, 0.0)) for i in range(n)]
        gates += [rotation(GateKind.RX, (i,), beta, 2.0) for i in range(n)]

    layout = ParamLayout(labels=tuple(labels))
    circuit = Circuit(
        n_qubits=n,
        gates=tuple(gates),
        initial_state=InitialState.ALL_PLUS,
        n_params=layout.n_params,
    )
    logger.debug("Built QAOA circuit: %s qubits, %s layers, %s gates", n, layers, len(gates))
    return circuit, layout


def count_gates(circuit: Circuit) -> GateCounts:
    """Literal gate count by arity; an |+>^n preparation counts as n Hadamards"""
    doubles = sum(1 for gate in circuit.gates if gate.kind.arity == 2)
    singles = len(circuit.gates) - doubles
    if circuit.initial_state is InitialState.ALL_PLUS:
        singles += circuit.n_qubits
    return GateCounts(singles=singles, doubles=doubles)


def paper_cost_model(
    alg: Algorithm,
    problem: ProblemType,
    n_qubits: int,
    n_edges: int,
    layers: int,
) -> tuple[GateCounts, int]:
    """Closed-form (single, two-qubit) gate counts and parameter count as published for each benchmark"""
    if alg is Algorithm.QAOA:
        counts = GateCounts(singles=2 * n_qubits * layers + n_qubits, doubles=n_edges * layers)
        return counts, 2 * layers

    if problem is ProblemType.PORTFOLIO:
        singles = (2 * n_qubits + n_edges) * layers
    else:
        singles = 2 * n_qubits * layers
    counts = GateCounts(singles=singles, doubles=2 * n_edges * layers)
    return counts, (2 * n_qubits + 1) * layers
