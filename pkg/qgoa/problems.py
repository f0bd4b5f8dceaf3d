import itertools
import json
import logging
import random
from pathlib import Path
from typing import Literal, Optional

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qgoa.errors import InstanceParseError, OracleBoundError

logger = logging.getLogger(__name__)

# Exhaustive search above this many variables is refused
ORACLE_MAX_VARIABLES = 24

# Assignments within this much of the minimum count as tied optima
ORACLE_TIE_TOLERANCE = 1e-12

DEFAULT_LAMBDA = 0.5
DEFAULT_PENALTY = 1.0


class ProblemKind(BaseModel):
    """Which generator produced an instance, with its trade-off or penalty weight."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    type: Literal['portfolio', 'mvc', 'generic'] = 'generic'
    lambda_: Optional[float] = Field(None, alias='lambda', ge=0.0, le=1.0)
    b: Optional[float] = None


class QuboInstance(BaseModel):
    """
    A quadratic binary objective

    l(x) = sum_i (diag_i + linear_i) x_i + sum_{i<j} 2 quad_ij x_i x_j + constant

    Each unordered pair is stored once; the factor 2 folds the symmetric double sum over (i, j) and (j, i).
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    quad: dict[tuple[int, int], float] = Field(default_factory=dict)
    diag: tuple[float, ...]
    linear: tuple[float, ...]
    constant: float = 0.0
    kind: ProblemKind = Field(default_factory=ProblemKind)
    seed: int = 0

    @model_validator(mode='after')
    def check_indices(self) -> 'QuboInstance':
        """Indices must be in range and pairs strictly ordered."""
        if len(self.diag) != self.n:
            raise ValueError(f'diag has {len(self.diag)} entries, expected {self.n}')
        if len(self.linear) != self.n:
            raise ValueError(f'linear has {len(self.linear)} entries, expected {self.n}')
        for i, j in self.quad:
            if not 0 <= i < j < self.n:
                raise ValueError(f'Pair ({i}, {j}) must satisfy 0 <= i < j < {self.n}')
        return self

    @property
    def pairs(self) -> list[tuple[int, int, float]]:
        """Nonzero (i, j, a_ij) in lexicographic order"""
        return [(i, j, w) for (i, j), w in sorted(self.quad.items()) if w != 0.0]

    def evaluate(self, bits: str) -> float:
        """Objective of one decision bitstring (variable 0 is the last character)"""
        if len(bits) != self.n:
            raise ValueError(f'Bitstring {bits!r} has length {len(bits)}, expected {self.n}')
        x = [int(c) for c in reversed(bits)]
        value = self.constant
        for i in range(self.n):
            value += (self.diag[i] + self.linear[i]) * x[i]
        for i, j, w in self.pairs:
            value += 2.0 * w * x[i] * x[j]
        return value

    def evaluate_all(self) -> np.ndarray:
        """Objective of every assignment, indexed with variable i as bit i"""
        index = np.arange(2 ** self.n, dtype=np.int64)
        bits = [((index >> i) & 1).astype(np.float64) for i in range(self.n)]
        values = np.full(2 ** self.n, self.constant, dtype=np.float64)
        for i in range(self.n):
            values += (self.diag[i] + self.linear[i]) * bits[i]
        for i, j, w in self.pairs:
            values += 2.0 * w * bits[i] * bits[j]
        return values


class GraphInstance(BaseModel):
    """A weighted simple graph: edge weights E_ij and vertex weights E_ii."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    edges: dict[tuple[int, int], float] = Field(default_factory=dict)
    vertex_weights: tuple[float, ...] = ()

    @model_validator(mode='before')
    @classmethod
    def fill_vertex_weights(cls, data):
        """An omitted diagonal means zero vertex weights."""
        if isinstance(data, dict) and not data.get('vertex_weights') and isinstance(data.get('n'), int):
            data = {**data, 'vertex_weights': (0.0,) * data['n']}
        return data

    @model_validator(mode='after')
    def check_simple(self) -> 'GraphInstance':
        """No self loops, no zero edges, ordered pairs, and one weight per vertex."""
        if len(self.vertex_weights) != self.n:
            raise ValueError(f'vertex_weights has {len(self.vertex_weights)} entries, expected {self.n}')
        for (i, j), w in self.edges.items():
            if i == j:
                raise ValueError(f'Self loop on vertex {i}; put its weight in vertex_weights')
            if not 0 <= i < j < self.n:
                raise ValueError(f'Edge ({i}, {j}) must satisfy 0 <= i < j < {self.n}')
            if w == 0.0:
                raise ValueError(f'Edge ({i}, {j}) has zero weight')
        return self

    @property
    def sorted_edges(self) -> list[tuple[int, int, float]]:
        """Edges in canonical (lexicographic) order"""
        return [(i, j, w) for (i, j), w in sorted(self.edges.items())]

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: list[tuple[int, int]] | dict[tuple[int, int], float],
        vertex_weights: Optional[list[float]] = None,
    ) -> 'GraphInstance':
        """Build a graph from an edge list (unit weights) or an edge -> weight map, in any pair order"""
        if not isinstance(edges, dict):
            edges = {edge: 1.0 for edge in edges}
        canonical = {(min(i, j), max(i, j)): w for (i, j), w in edges.items()}
        return cls(n=n, edges=canonical, vertex_weights=tuple(vertex_weights or ()))


class OracleResult(BaseModel):
    """Exhaustive-search optimum with every tied minimizer."""

    optimal_value: float
    optimal_bitstrings: list[str]
    evaluations: int


def _check_edge_budget(n: int, n_edges: int) -> None:
    max_edges = n * (n - 1) // 2
    if not 0 <= n_edges <= max_edges:
        raise ValueError(f'{n_edges} edges do not fit a simple graph on {n} vertices (max {max_edges})')


def gen_portfolio(n: int, n_edges: int, lam: float = DEFAULT_LAMBDA, seed: int = 0) -> QuboInstance:
    """
    Generate a sparse portfolio instance

    Variances, returns and the covariances on a uniformly drawn edge set are independent Uniform(0, 1).
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f'lambda {lam} must lie in [0, 1]')
    _check_edge_budget(n, n_edges)

    rng = random.Random(seed)
    variances = [rng.random() for _ in range(n)]
    returns = [rng.random() for _ in range(n)]
    edge_set = sorted(rng.sample(list(itertools.combinations(range(n), 2)), n_edges))
    covariances = {edge: rng.random() for edge in edge_set}

    return QuboInstance(
        n=n,
        quad={edge: lam * v for edge, v in covariances.items()},
        diag=tuple(lam * v for v in variances),
        linear=tuple(-(1.0 - lam) * mu for mu in returns),
        kind=ProblemKind(type='portfolio', lambda_=lam),
        seed=seed,
    )


def portfolio_data(inst: QuboInstance) -> tuple[np.ndarray, np.ndarray, float]:
    """Recover (V, mu, lambda) from a portfolio instance"""
    if inst.kind.type != 'portfolio' or inst.kind.lambda_ is None:
        raise ValueError(f'Instance of kind {inst.kind.type!r} carries no portfolio data')
    lam = inst.kind.lambda_
    if lam == 0.0 or lam == 1.0:
        # one half of the objective vanished at generation and cannot be recovered
        raise ValueError(f'Covariance and returns are not both recoverable at lambda={lam}')
    covariance = np.diag(np.array(inst.diag) / lam)
    for (i, j), w in inst.quad.items():
        covariance[i, j] = covariance[j, i] = w / lam
    returns = -np.array(inst.linear) / (1.0 - lam)
    return covariance, returns, lam


def gen_mvc(n: int, n_edges: int, b: float = DEFAULT_PENALTY, seed: int = 0) -> tuple[QuboInstance, GraphInstance]:
    """
    Generate a minimum vertex cover instance on a uniform random graph with exactly n_edges edges

    Objective: sum over edges of (1 - x_i)(1 - x_j) plus b per chosen vertex.
    """
    _check_edge_budget(n, n_edges)
    graph = GraphInstance.from_edges(n, list(nx.gnm_random_graph(n, n_edges, seed=seed).edges()))
    return mvc_qubo(graph, b, seed), graph


def mvc_qubo(graph: GraphInstance, b: float = DEFAULT_PENALTY, seed: int = 0) -> QuboInstance:
    """Vertex cover objective of a graph's edge set; edge weights are ignored"""
    edges = [(i, j) for i, j, _ in graph.sorted_edges]
    linear = [b] * graph.n
    for i, j in edges:
        linear[i] -= 1.0
        linear[j] -= 1.0

    return QuboInstance(
        n=graph.n,
        # x_i x_j appears with weight 1, i.e. a_ij = a_ji = 1/2
        quad={edge: 0.5 for edge in edges},
        diag=(0.0,) * graph.n,
        linear=tuple(linear),
        constant=float(len(edges)),
        kind=ProblemKind(type='mvc', b=b),
        seed=seed,
    )


def instance_graph(inst: QuboInstance) -> GraphInstance:
    """The weighted graph of an instance: E_ij = a_ij on nonzero pairs, E_ii = a_ii"""
    return GraphInstance(
        n=inst.n,
        edges={(i, j): w for i, j, w in inst.pairs},
        vertex_weights=inst.diag,
    )


def adjacency_graph(inst: QuboInstance) -> GraphInstance:
    """Unit-weight graph on the instance's nonzero pairs, with no vertex weights"""
    return GraphInstance.from_edges(inst.n, [(i, j) for i, j, _ in inst.pairs])


def aggregation_graph(inst: QuboInstance) -> GraphInstance:
    """The graph that drives the aggregation layer: raw adjacency for vertex cover, weighted otherwise"""
    if inst.kind.type == 'mvc':
        return adjacency_graph(inst)
    return instance_graph(inst)


def format_bits(index: int, n: int) -> str:
    """Bitstring of an index, most significant bit first"""
    return format(index, f'0{n}b')


def brute_force(inst: QuboInstance) -> OracleResult:
    """Evaluate every assignment and return the optimum with all tied minimizers"""
    if inst.n > ORACLE_MAX_VARIABLES:
        raise OracleBoundError(f'{inst.n} variables exceed the exhaustive-search bound of {ORACLE_MAX_VARIABLES}')
    values = inst.evaluate_all()
    optimum = float(values.min())
    winners = sorted(format_bits(int(i), inst.n) for i in np.flatnonzero(values <= optimum + ORACLE_TIE_TOLERANCE))
    logger.debug("Brute force over %s assignments: optimum %s, %s minimizer(s)", values.size, optimum, len(winners))
    return OracleResult(optimal_value=optimum, optimal_bitstrings=winners, evaluations=int(values.size))


class QuadEntry(BaseModel):
    """One off-diagonal coefficient in an instance file."""

    i: int = Field(ge=0)
    j: int = Field(ge=0)
    w: float

    @model_validator(mode='after')
    def check_order(self) -> 'QuadEntry':
        """Pairs are stored once with i < j."""
        if self.i >= self.j:
            raise ValueError(f'expected i < j, got i={self.i}, j={self.j}')
        return self


class InstanceFile(BaseModel):
    """On-disk schema of an instance."""

    model_config = ConfigDict(extra='forbid')

    n: int = Field(ge=1)
    kind: ProblemKind
    seed: int
    diag: list[float]
    linear: list[float]
    quad: list[QuadEntry]
    constant: float = 0.0

    @classmethod
    def from_instance(cls, inst: QuboInstance) -> 'InstanceFile':
        """Flatten an instance into the file schema"""
        return cls(
            n=inst.n,
            kind=inst.kind,
            seed=inst.seed,
            diag=list(inst.diag),
            linear=list(inst.linear),
            quad=[QuadEntry(i=i, j=j, w=w) for (i, j), w in sorted(inst.quad.items())],
            constant=inst.constant,
        )

    def to_instance(self) -> QuboInstance:
        """Rebuild the in-memory instance"""
        return QuboInstance(
            n=self.n,
            quad={(entry.i, entry.j): entry.w for entry in self.quad},
            diag=tuple(self.diag),
            linear=tuple(self.linear),
            constant=self.constant,
            kind=self.kind,
            seed=self.seed,
        )


def save_instance(inst: QuboInstance, path: Path) -> None:
    """Write an instance as UTF-8 JSON"""
    payload = InstanceFile.from_instance(inst).model_dump_json(indent=2, by_alias=True, exclude_none=True)
    Path(path).write_text(payload + '\n', encoding='utf-8')
    logger.info("Saved %s instance with %s variables to %s", inst.kind.type, inst.n, path)


def load_instance(path: Path) -> QuboInstance:
    """Read an instance file, reporting the offending line or field on failure"""
    text = Path(path).read_text(encoding='utf-8')
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as error:
        raise InstanceParseError(f'{error.msg} (column {error.colno})', field='<json>', line=error.lineno) from error

    try:
        return InstanceFile.model_validate(payload).to_instance()
    except ValidationError as error:
        first = error.errors()[0]
        field = '.'.join(str(part) for part in first['loc']) or '<root>'
        raise InstanceParseError(first['msg'], field=field) from error
