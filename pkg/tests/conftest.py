from __future__ import annotations

import numpy as np
import pytest

from qlattice import GridSpec, ModelParams, ParticleSpec, WaveFunction
from qlattice.state import normalize


def random_state(grid: GridSpec, n_particles: int, seed: int = 0) -> WaveFunction:
    """Normalized random complex state, reproducible by seed."""
    rng = np.random.default_rng(seed)
    size = grid.size(n_particles)
    amp = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return normalize(WaveFunction(grid, n_particles, amp))


def simple_params(n: int, mass: float = 1.0, spring_k: float = 1.0, hbar: float = 1.0) -> ModelParams:
    return ModelParams(
        hbar=hbar,
        particles=tuple(ParticleSpec(mass=mass, spring_k=spring_k) for _ in range(n)),
    )


@pytest.fixture
def grid3() -> GridSpec:
    return GridSpec(m=3, n=3, dx=1.0, dy=1.0)


@pytest.fixture
def grid4() -> GridSpec:
    return GridSpec(m=4, n=4, dx=1.0, dy=1.0)
