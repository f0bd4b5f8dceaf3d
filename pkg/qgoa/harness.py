import logging
import math
from multiprocessing import Pool
from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qgoa.ansatz import (
    Algorithm,
    AggregationSplit,
    GateCounts,
    ProblemType,
    build_qaoa,
    build_qgoa,
    count_gates,
    paper_cost_model,
)
from qgoa.errors import ConsistencyError, OracleBoundError
from qgoa.observables import CompiledObservable, Observable, compile_instance
from qgoa.optimizer import AdamConfig, OptTrace, adam_minimize, init_params
from qgoa.problems import (
    DEFAULT_LAMBDA,
    DEFAULT_PENALTY,
    GraphInstance,
    OracleResult,
    QuboInstance,
    aggregation_graph,
    brute_force,
    gen_mvc,
    gen_portfolio,
    load_instance,
)
from qgoa.simulator import SimulatorSettings
from qgoa.simulator.circuit import Circuit, ParamLayout, run_circuit
from qgoa.simulator.statevector import expectation, probabilities
from qgoa.type_aliases import Distribution, ParamArray

logger = logging.getLogger(__name__)

# Decision bitstrings kept per run for the distribution dump
TOP_BITSTRINGS = 32

# Probabilities closer than this count as tied for the most probable bitstring
ARGMAX_TIE_TOLERANCE = 1e-12

# Slack allowed below the oracle optimum before a loss is treated as a bug
VARIATIONAL_SLACK = 1e-9


class GeneratorSpec(BaseModel):
    """How to generate a benchmark instance."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: Literal['portfolio', 'mvc']
    n: int = Field(ge=1)
    edges: int = Field(ge=0)
    lambda_: float = Field(DEFAULT_LAMBDA, alias='lambda', ge=0.0, le=1.0)
    b: float = Field(DEFAULT_PENALTY)
    seed: int = Field(0)

    def generate(self) -> QuboInstance:
        """Run the generator"""
        if self.kind == 'portfolio':
            return gen_portfolio(self.n, self.edges, self.lambda_, self.seed)
        return gen_mvc(self.n, self.edges, self.b, self.seed)[0]


class ExperimentConfig(BaseModel):
    """One instance, one algorithm, a set of layer counts and seeds."""

    model_config = ConfigDict(frozen=True)

    instance_path: Optional[Path] = None
    generator: Optional[GeneratorSpec] = None
    algorithm: Algorithm = Field(Algorithm.QGOA)
    layers: list[int] = Field([2], min_length=1)
    seeds: list[int] = Field([0], min_length=1)
    adam: AdamConfig = Field(default_factory=AdamConfig)
    split: AggregationSplit = Field(AggregationSplit.BLOCK)
    output_dir: Path = Field(Path('results'))

    @model_validator(mode='after')
    def check_source(self) -> 'ExperimentConfig':
        """Exactly one instance source, and positive layer counts."""
        if (self.instance_path is None) == (self.generator is None):
            raise ValueError('Give exactly one of instance_path or generator')
        if any(layer < 1 for layer in self.layers):
            raise ValueError(f'Layer counts {self.layers} must all be at least 1')
        return self

    def load(self) -> QuboInstance:
        """The instance this experiment runs on"""
        if self.instance_path is not None:
            return load_instance(self.instance_path)
        return self.generator.generate()


class RunResult(BaseModel):
    """Outcome of one (algorithm, layer, seed) cell."""

    id: str
    algorithm: Algorithm
    layer: int
    seed: int
    kind: str
    n_qubits: int
    n_edges: int
    status: Literal['ok', 'failed'] = 'ok'
    error: Optional[str] = None

    converged_T: Optional[int] = None
    converged_at: Optional[int] = None
    max_iters: int = 0
    final_loss: Optional[float] = None
    oracle_optimum: Optional[float] = None
    optimal_bitstrings: list[str] = Field(default_factory=list)
    # probability of each oracle bitstring; p_optimal is their sum in this order
    optimal_probabilities: list[float] = Field(default_factory=list)
    p_optimal: Optional[float] = None
    argmax_match: Optional[bool] = None

    gate_counts: Optional[GateCounts] = None
    paper_model: Optional[GateCounts] = None
    n_params: Optional[int] = None
    paper_n_params: Optional[int] = None

    final_params: list[float] = Field(default_factory=list)
    top_distribution: dict[str, float] = Field(default_factory=dict)
    trace: Optional[OptTrace] = None
    trace_path: str = ''

    @property
    def sort_key(self) -> tuple[str, int, int]:
        """Canonical report order"""
        return self.algorithm.value, self.layer, self.seed


def run_id(alg: Algorithm, layer: int, seed: int) -> str:
    """File-safe identifier of a cell"""
    return f'{alg.value}-L{layer}-s{seed}'


def success_metrics(probs: Distribution, oracle: OracleResult) -> tuple[float, bool]:
    """
    Probability mass on the oracle optimum and whether the most probable bitstring is optimal

    When several bitstrings share the top probability, any one of them being optimal counts.
    """
    p_optimal = sum(probs.get(bits, 0.0) for bits in oracle.optimal_bitstrings)
    if not probs:
        return p_optimal, False
    top = max(probs.values())
    optimal = set(oracle.optimal_bitstrings)
    argmax_match = any(p >= top - ARGMAX_TIE_TOLERANCE and bits in optimal for bits, p in probs.items())
    return p_optimal, argmax_match


def decision_distribution(probs: Distribution, compiled: CompiledObservable) -> Distribution:
    """Re-key a qubit distribution by decision bitstring"""
    return {compiled.decode(bits): p for bits, p in probs.items()}


def top_bitstrings(probs: Distribution, k: int = TOP_BITSTRINGS) -> dict[str, float]:
    """The k most probable bitstrings, most probable first"""
    ranked = sorted(probs.items(), key=lambda item: (-item[1], item[0]))
    return dict(ranked[:k])


def build_circuit(
    instance: QuboInstance,
    compiled: CompiledObservable,
    alg: Algorithm,
    layers: int,
    split: AggregationSplit = AggregationSplit.BLOCK,
) -> tuple[Circuit, ParamLayout]:
    """The ansatz circuit for an instance"""
    if alg is Algorithm.QAOA:
        return build_qaoa(compiled.observable, layers)
    return build_qgoa(aggregation_graph(instance), layers, split)


def cost_check(instance: QuboInstance, alg: Algorithm, layers: int, actual: GateCounts) -> Optional[GateCounts]:
    """Published gate counts for the instance, logging any difference from the built circuit"""
    if instance.kind.type not in ('portfolio', 'mvc'):
        return None
    problem = ProblemType(instance.kind.type)
    paper, _ = paper_cost_model(alg, problem, instance.n, len(instance.pairs), layers)
    if actual != paper:
        logger.warning(
            "%s %s L=%s: circuit has N1=%s N2=%s, published formula gives N1=%s N2=%s",
            alg.value, problem.value, layers, actual.singles, actual.doubles, paper.singles, paper.doubles,
        )
    return paper


def run_single(
    cfg: ExperimentConfig,
    layer: int,
    seed: int,
    init: Optional[ParamArray] = None,
) -> RunResult:
    """Build, optimize and score one cell; `init` overrides the seeded starting point"""
    instance = cfg.load()
    compiled = compile_instance(instance)
    alg = cfg.algorithm
    circuit, layout = build_circuit(instance, compiled, alg, layer, cfg.split)

    actual = count_gates(circuit)
    paper = cost_check(instance, alg, layer, actual)
    paper_n_params = None
    if paper is not None:
        problem = ProblemType(instance.kind.type)
        paper_n_params = paper_cost_model(alg, problem, instance.n, len(instance.pairs), layer)[1]

    start = init_params(layout, seed) if init is None else np.asarray(init, dtype=np.float64)
    adam = cfg.adam.model_copy(update={'seed': seed})
    trace = adam_minimize(circuit, compiled, start, adam)

    state = run_circuit(circuit, trace.final_params)
    probs = decision_distribution(probabilities(state), compiled)
    key = run_id(alg, layer, seed)
    result = RunResult(
        id=key,
        algorithm=alg,
        layer=layer,
        seed=seed,
        kind=instance.kind.type,
        n_qubits=instance.n,
        n_edges=len(instance.pairs),
        converged_T=trace.iterations,
        converged_at=trace.converged_at,
        max_iters=adam.max_iters,
        final_loss=trace.final_loss,
        gate_counts=actual,
        paper_model=paper,
        n_params=layout.n_params,
        paper_n_params=paper_n_params,
        final_params=trace.final_params,
        top_distribution=top_bitstrings(probs),
        trace=trace,
        trace_path=f'traces/{key}.csv',
    )

    try:
        oracle = brute_force(instance)
    except OracleBoundError as error:
        logger.info("Success metrics unavailable for %s: %s", key, error)
        return result

    if trace.final_loss < oracle.optimal_value - VARIATIONAL_SLACK:
        raise ConsistencyError(f'{key}: loss {trace.final_loss!r} is below the optimum {oracle.optimal_value!r}')
    p_optimal, argmax_match = success_metrics(probs, oracle)
    result = result.model_copy(update={
        'oracle_optimum': oracle.optimal_value,
        'optimal_bitstrings': oracle.optimal_bitstrings,
        'optimal_probabilities': [probs.get(bits, 0.0) for bits in oracle.optimal_bitstrings],
        'p_optimal': p_optimal,
        'argmax_match': argmax_match,
    })
    logger.info(
        "%s: loss %.6f (optimum %.6f), T=%s, p_optimal %.4f, argmax %s",
        key, trace.final_loss, oracle.optimal_value, trace.iterations, p_optimal, argmax_match,
    )
    return result


def _run_cell(cfg: ExperimentConfig, layer: int, seed: int) -> RunResult:
    """run_single, turning a failure into a failed result"""
    try:
        return run_single(cfg, layer, seed)
    except Exception as error:
        key = run_id(cfg.algorithm, layer, seed)
        logger.error("Cell %s failed: %s", key, error)
        return RunResult(
            id=key,
            algorithm=cfg.algorithm,
            layer=layer,
            seed=seed,
            kind=cfg.generator.kind if cfg.generator is not None else 'generic',
            n_qubits=cfg.generator.n if cfg.generator is not None else 0,
            n_edges=cfg.generator.edges if cfg.generator is not None else 0,
            status='failed',
            error=f'{type(error).__name__}: {error}',
            max_iters=cfg.adam.max_iters,
        )


def sweep(
    cfg: ExperimentConfig,
    algorithms: Optional[Sequence[Algorithm]] = None,
    threads: Optional[int] = None,
) -> list[RunResult]:
    """Every (algorithm, layer, seed) cell, in canonical order whatever the completion order"""
    algorithms = list(algorithms or [cfg.algorithm])
    threads = threads or SimulatorSettings().threads
    cells = [
        (cfg.model_copy(update={'algorithm': alg}), layer, seed)
        for alg in algorithms
        for layer in cfg.layers
        for seed in cfg.seeds
    ]
    logger.info("Sweeping %s cells on %s worker(s)", len(cells), threads)

    if threads > 1:
        with Pool(threads) as pool:
            results = pool.starmap(_run_cell, cells)
    else:
        results = [_run_cell(*cell) for cell in cells]

    failed = sum(1 for result in results if result.status == 'failed')
    if failed:
        logger.warning("%s of %s cells failed", failed, len(results))
    return sorted(results, key=lambda result: result.sort_key)


class LayerSummary(BaseModel):
    """Aggregate over the seeds of one (algorithm, layer)."""

    algorithm: Algorithm
    layer: int
    runs: int
    failed: int
    best_loss: Optional[float] = None
    median_loss: Optional[float] = None
    mean_p_optimal: Optional[float] = None
    success_rate: Optional[float] = None
    median_T: Optional[int] = None


def summarize_layers(results: Sequence[RunResult]) -> list[LayerSummary]:
    """Best and median final loss, mean p_optimal and argmax success rate per (algorithm, layer)"""
    groups: dict[tuple[Algorithm, int], list[RunResult]] = {}
    for result in sorted(results, key=lambda r: r.sort_key):
        groups.setdefault((result.algorithm, result.layer), []).append(result)

    summaries = []
    for (alg, layer), group in groups.items():
        ok = [r for r in group if r.status == 'ok']
        summary = LayerSummary(algorithm=alg, layer=layer, runs=len(group), failed=len(group) - len(ok))
        if ok:
            losses = [r.final_loss for r in ok]
            scored = [r for r in ok if r.p_optimal is not None]
            summary = summary.model_copy(update={
                'best_loss': float(min(losses)),
                'median_loss': float(np.median(losses)),
                'median_T': int(math.ceil(np.median([r.converged_T for r in ok]))),
            })
            if scored:
                summary = summary.model_copy(update={
                    'mean_p_optimal': float(np.mean([r.p_optimal for r in scored])),
                    'success_rate': sum(1 for r in scored if r.argmax_match) / len(scored),
                })
        summaries.append(summary)
    return summaries


def best_layers(summaries: Sequence[LayerSummary]) -> dict[Algorithm, LayerSummary]:
    """Layer with the lowest median final loss per algorithm; ties go to the shallower circuit"""
    best: dict[Algorithm, LayerSummary] = {}
    for summary in summaries:
        if summary.median_loss is None:
            continue
        current = best.get(summary.algorithm)
        if current is None or (summary.median_loss, summary.layer) < (current.median_loss, current.layer):
            best[summary.algorithm] = summary
    return best


class ScaleConfig(BaseModel):
    """A resource-scaling study over register sizes."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: Literal['portfolio', 'mvc'] = 'portfolio'
    sizes: list[int] = Field([4, 5, 6, 7, 8], min_length=1)
    # edges per qubit, capped at the complete graph
    density: float = Field(2.0, gt=0.0)
    algorithms: list[Algorithm] = Field([Algorithm.QGOA, Algorithm.QAOA], min_length=1)
    layers: list[int] = Field([2], min_length=1)
    seeds: list[int] = Field([0], min_length=1)
    adam: AdamConfig = Field(default_factory=AdamConfig)
    lambda_: float = Field(DEFAULT_LAMBDA, alias='lambda', ge=0.0, le=1.0)
    b: float = Field(DEFAULT_PENALTY)
    instance_seed: int = Field(0)

    def edges_for(self, n: int) -> int:
        """Edge count of the size-n instance"""
        return min(round(self.density * n), n * (n - 1) // 2)


class ScaleRow(BaseModel):
    """Resources of one algorithm at one register size."""

    algorithm: Algorithm
    n_qubits: int
    n_edges: int
    best_layer: int
    n2_actual: int
    T: int
    np: int

    @property
    def classical_cost(self) -> int:
        """Optimizer iterations times parameter count"""
        return self.T * self.np


def scalability_curve(cfg: ScaleConfig, threads: Optional[int] = None) -> list[ScaleRow]:
    """Quantum (two-qubit gates) and classical (T * N_p) cost per size, at each algorithm's best layer"""
    rows = []
    for n in cfg.sizes:
        spec = GeneratorSpec(kind=cfg.kind, n=n, edges=cfg.edges_for(n), lambda_=cfg.lambda_, b=cfg.b,
                             seed=cfg.instance_seed)
        experiment = ExperimentConfig(generator=spec, layers=cfg.layers, seeds=cfg.seeds, adam=cfg.adam)
        results = sweep(experiment, cfg.algorithms, threads)
        for alg, summary in sorted(best_layers(summarize_layers(results)).items(), key=lambda item: item[0].value):
            run = next(r for r in results if r.algorithm is alg and r.layer == summary.layer and r.status == 'ok')
            rows.append(ScaleRow(
                algorithm=alg,
                n_qubits=n,
                n_edges=spec.edges,
                best_layer=summary.layer,
                n2_actual=run.gate_counts.doubles,
                T=summary.median_T,
                np=run.n_params,
            ))
            logger.info("n=%s %s: best L=%s, N2=%s, T=%s", n, alg.value, summary.layer, run.gate_counts.doubles,
                        summary.median_T)
    return rows


# Path V2 - V1 - V3 on qubits 1 - 0 - 2
LOCALITY_GRAPH = GraphInstance.from_edges(3, [(0, 1), (0, 2)])


def locality_probe(
    x: Sequence[float],
    theta_y: Sequence[float],
    theta_z: Sequence[float],
    eta: float,
    eps: float = 1e-5,
) -> np.ndarray:
    """
    Sensitivity of each single-qubit Z expectation to each encoded feature on the 3-vertex path

    Circuit: RY(x_i) encoding, RY(theta_y)/RZ(theta_z), one first-order aggregation layer at eta.
    Entry [i, j] is the central difference of <Z_i> with respect to x_j.
    """
    if not (len(x) == len(theta_y) == len(theta_z) == LOCALITY_GRAPH.n):
        raise ValueError(f'Expected {LOCALITY_GRAPH.n} features and angles')
    params = np.concatenate([theta_y, theta_z, [eta]])
    measures = [Observable.from_terms(LOCALITY_GRAPH.n, [(f'Z{i}', 1.0)]) for i in range(LOCALITY_GRAPH.n)]

    def z_expectations(features: np.ndarray) -> np.ndarray:
        circuit, _ = build_qgoa(LOCALITY_GRAPH, 1, encoding=list(features))
        state = run_circuit(circuit, params)
        return np.array([expectation(state, measure) for measure in measures])

    x = np.asarray(x, dtype=np.float64)
    sensitivity = np.zeros((LOCALITY_GRAPH.n, LOCALITY_GRAPH.n))
    for j in range(LOCALITY_GRAPH.n):
        shift = np.zeros_like(x)
        shift[j] = eps
        sensitivity[:, j] = (z_expectations(x + shift) - z_expectations(x - shift)) / (2 * eps)
    return sensitivity
