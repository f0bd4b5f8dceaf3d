import os

from pydantic import BaseModel, Field

THREADS_ENV = 'QGOA_THREADS'


def _default_threads() -> int:
    return int(os.environ.get(THREADS_ENV, '1'))


class SimulatorSettings(BaseModel):
    """Settings for running many simulations."""

    # worker processes for sweeps; each simulation itself is single threaded
    threads: int = Field(default_factory=_default_threads, ge=1)
