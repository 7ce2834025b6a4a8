"""Position measurement: detection probabilities, the probabilistic click
draw, and wavefunction collapse to a single cell.

A click probes one cell. Each particle is detected there with its marginal
probability; at most one particle can be detected per click. If the summed
probability exceeds 1 (possible since marginals are independent), all
probabilities are rescaled by the sum so relative likelihoods survive and
"no detection" becomes impossible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QLatticeError
from .grid import Cell
from .state import WaveFunction, marginal, _check_particle


@dataclass(frozen=True)
class MeasurementOutcome:
    """Result of probing one cell: per-particle detection probabilities and
    which particle (if any) the draw selected."""

    cell: Cell
    probs: tuple[float, ...]
    detected: int | None


def detection_probs(psi: WaveFunction, cell: Cell) -> list[float]:
    """Probability of finding each particle at the probed cell."""
    if not psi.grid.contains(cell.ax, cell.ay):
        raise QLatticeError(f"cell outside grid: ({cell.ax}, {cell.ay})")
    return [marginal(psi, k).at(cell) for k in range(psi.n_particles)]


def sample_detection(
    psi: WaveFunction, cell: Cell, rng: np.random.Generator
) -> MeasurementOutcome:
    """Draw the click outcome. Does not modify psi.

    Categorical over {particle 0, ..., particle N-1, none}: with
    S = sum of per-particle probabilities, "none" has probability
    max(0, 1 - S); for S > 1 the particle probabilities are scaled by 1/S.
    """
    probs = detection_probs(psi, cell)
    total = sum(probs)
    scale = 1.0 / total if total > 1.0 else 1.0
    u = rng.random()
    acc = 0.0
    detected: int | None = None
    for k, p in enumerate(probs):
        acc += p * scale
        if u < acc:
            detected = k
            break
    return MeasurementOutcome(cell=cell, probs=tuple(probs), detected=detected)


def collapse(psi: WaveFunction, k: int, cell: Cell) -> WaveFunction:
    """Project particle k onto one cell and renormalize.

    Every configuration with particle k elsewhere is zeroed; surviving
    amplitudes keep their relative values exactly, so particles other than
    k are disturbed only through whatever entanglement already existed.
    """
    _check_particle(psi, k)
    if not psi.grid.contains(cell.ax, cell.ay):
        raise QLatticeError(f"cell outside grid: ({cell.ax}, {cell.ay})")
    tensor = psi.tensor()
    index: list[slice | int] = [slice(None)] * (2 * psi.n_particles)
    index[2 * k] = cell.ax
    index[2 * k + 1] = cell.ay
    surviving = tensor[tuple(index)]
    norm_sq = float(np.vdot(surviving, surviving).real)
    if norm_sq == 0.0:
        raise QLatticeError(
            f"impossible collapse: particle {k} has zero probability at "
            f"({cell.ax}, {cell.ay})"
        )
    out = np.zeros_like(tensor)
    out[tuple(index)] = surviving / np.sqrt(norm_sq)
    return WaveFunction(psi.grid, psi.n_particles, out.reshape(-1))
