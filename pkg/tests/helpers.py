import numpy as np

from qgoa.problems import GraphInstance, ProblemKind, QuboInstance


def random_graph(rng: np.random.Generator, n: int, p: float = 0.6, diagonal: bool = True) -> GraphInstance:
    """Weighted graph with at least one edge"""
    edges = {(i, j): float(rng.uniform(0.1, 1.0)) for i in range(n) for j in range(i + 1, n) if rng.random() < p}
    if not edges:
        edges = {(0, 1): 0.5}
    weights = [float(w) for w in rng.uniform(-1.0, 1.0, n)] if diagonal else None
    return GraphInstance.from_edges(n, edges, weights)


def random_qubo(rng: np.random.Generator, n: int) -> QuboInstance:
    """Dense generic instance"""
    return QuboInstance(
        n=n,
        quad={(i, j): float(rng.normal()) for i in range(n) for j in range(i + 1, n)},
        diag=tuple(float(v) for v in rng.normal(size=n)),
        linear=tuple(float(v) for v in rng.normal(size=n)),
        constant=float(rng.normal()),
        kind=ProblemKind(type='generic'),
    )


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    amplitudes = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return amplitudes / np.linalg.norm(amplitudes)
