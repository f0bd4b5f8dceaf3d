import logging
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qgoa.errors import NonFiniteError
from qgoa.observables import CompiledObservable, Observable
from qgoa.simulator.circuit import Circuit, ParamLayout
from qgoa.simulator.gradients import energy, value_and_adjoint_gradient
from qgoa.type_aliases import ParamArray

logger = logging.getLogger(__name__)

# Fewest trailing losses the convergence test compares
MIN_WINDOW = 2

IterationCallback = Callable[[int, float, float], None]


class GradientEngine(str, Enum):
    """How gradients are obtained."""

    ADJOINT = 'adjoint'
    FINITE_DIFF = 'finite_diff'


class AdamConfig(BaseModel):
    """Settings for an ADAM run."""

    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(0.05, gt=0.0)
    beta1: float = Field(0.9, gt=0.0, lt=1.0)
    beta2: float = Field(0.999, gt=0.0, lt=1.0)
    epsilon: float = Field(1e-8, gt=0.0)
    max_iters: int = Field(500, ge=1)
    # stop once the loss range over the trailing window falls below tol
    tol: float = Field(1e-6, ge=0.0)
    # a range needs two losses, so window=1 behaves as window=2
    window: int = Field(25, ge=1)
    seed: int = Field(0)
    engine: GradientEngine = Field(GradientEngine.ADJOINT)
    fd_eps: float = Field(1e-5, gt=0.0)
    log_every: int = Field(50, ge=1)


class OptTrace(BaseModel):
    """Per-iteration record of an optimization run."""

    losses: list[float] = Field(default_factory=list)
    grad_norms: list[float] = Field(default_factory=list)
    final_params: list[float] = Field(default_factory=list)
    converged_at: Optional[int] = None
    max_iters: int = 0

    @property
    def final_loss(self) -> float:
        """Loss at the final parameters"""
        return self.losses[-1]

    @property
    def iterations(self) -> int:
        """Convergence iteration, or the budget when the run never converged"""
        return self.converged_at if self.converged_at is not None else self.max_iters


class AdamState:
    """First and second moment estimates of ADAM."""

    m: np.ndarray
    v: np.ndarray
    t: int

    def __init__(self, n_params: int):
        self.m = np.zeros(n_params, dtype=np.float64)
        self.v = np.zeros(n_params, dtype=np.float64)
        self.t = 0


def adam_step(params: np.ndarray, grad: np.ndarray, state: AdamState, cfg: AdamConfig) -> np.ndarray:
    """One bias-corrected ADAM update, returning new parameters"""
    state.t += 1
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad * grad
    m_hat = state.m / (1.0 - cfg.beta1 ** state.t)
    v_hat = state.v / (1.0 - cfg.beta2 ** state.t)
    return params - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)


def init_params(layout: ParamLayout | int, seed: int = 0) -> np.ndarray:
    """Uniform(-pi, pi) starting angles, deterministic per seed"""
    n_params = layout if isinstance(layout, int) else layout.n_params
    return np.random.default_rng(seed).uniform(-np.pi, np.pi, size=n_params)


def _split(observable: Union[Observable, CompiledObservable]) -> tuple[Observable, float]:
    if isinstance(observable, CompiledObservable):
        return observable.observable, observable.offset
    return observable, 0.0


def finite_diff_gradient(
    circuit: Circuit,
    observable: Union[Observable, CompiledObservable],
    params: ParamArray,
    eps: float = 1e-5,
) -> np.ndarray:
    """Central differences (f(p + eps e_j) - f(p - eps e_j)) / (2 eps)"""
    obs, _ = _split(observable)
    params = circuit.check_params(params)
    grad = np.zeros_like(params)
    for j in range(params.shape[0]):
        shift = np.zeros_like(params)
        shift[j] = eps
        grad[j] = (energy(circuit, obs, params + shift) - energy(circuit, obs, params - shift)) / (2 * eps)
    return grad


def evaluate(
    circuit: Circuit,
    observable: Union[Observable, CompiledObservable],
    params: ParamArray,
    engine: GradientEngine = GradientEngine.ADJOINT,
    eps: float = 1e-5,
) -> tuple[float, np.ndarray]:
    """Loss (offset included) and gradient at params"""
    obs, offset = _split(observable)
    if engine is GradientEngine.FINITE_DIFF:
        value = energy(circuit, obs, params)
        grad = finite_diff_gradient(circuit, obs, params, eps)
    else:
        value, grad = value_and_adjoint_gradient(circuit, obs, params)
    return value + offset, grad


def adam_minimize(
    circuit: Circuit,
    observable: Union[Observable, CompiledObservable],
    init: ParamArray,
    cfg: AdamConfig = AdamConfig(),
    on_iteration: Optional[IterationCallback] = None,
) -> OptTrace:
    """
    Minimize the circuit expectation with ADAM

    Stops after max_iters evaluations or once the last `window` losses span less than tol.
    At least MIN_WINDOW losses are compared, so a window of 1 converges no earlier than iteration 2.
    """
    params = circuit.check_params(init).copy()
    state = AdamState(circuit.n_params)
    trace = OptTrace(max_iters=cfg.max_iters)

    for iteration in range(cfg.max_iters):
        loss, grad = evaluate(circuit, observable, params, cfg.engine, cfg.fd_eps)
        grad_norm = float(np.linalg.norm(grad))
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise NonFiniteError(f'loss={loss}, |grad|={grad_norm}', iteration=iteration)

        trace.losses.append(loss)
        trace.grad_norms.append(grad_norm)
        trace.final_params = params.tolist()
        if on_iteration is not None:
            on_iteration(iteration, loss, grad_norm)
        if iteration % cfg.log_every == 0:
            logger.debug("Iteration %s: loss %.10f, |grad| %.3e", iteration, loss, grad_norm)

        span = max(cfg.window, MIN_WINDOW)
        window = trace.losses[-span:]
        if len(window) >= span and max(window) - min(window) < cfg.tol:
            trace.converged_at = len(trace.losses)
            break

        params = adam_step(params, grad, state, cfg)

    logger.debug(
        "ADAM finished after %s evaluations, loss %.10f, converged at %s",
        len(trace.losses), trace.final_loss, trace.converged_at,
    )
    return trace
