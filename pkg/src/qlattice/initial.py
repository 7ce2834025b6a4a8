"""Initial-state construction: Gaussian wavepacket product states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QLatticeError
from .grid import GridSpec
from .model import ModelParams
from .state import WaveFunction, normalize


@dataclass(frozen=True)
class GaussianSpec:
    """Center, width and mean momentum of one particle's initial packet."""

    center: tuple[float, float]
    width: float
    momentum: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.width > 0:
            raise QLatticeError(f"gaussian width must be > 0, got {self.width}")


def gaussian_product_state(
    grid: GridSpec, params: ModelParams, specs: list[GaussianSpec] | tuple[GaussianSpec, ...]
) -> WaveFunction:
    """Normalized product of per-particle Gaussians sampled on the grid.

    Each factor is exp(-|q - c|^2 / (4 sigma^2)) exp(i p.q / hbar) with raw
    (non-wrapped) distances from the center, so a center outside the grid
    simply yields a packet leaking in from that side.
    """
    if len(specs) != params.n_particles:
        raise QLatticeError(
            f"got {len(specs)} gaussian specs for {params.n_particles} particles"
        )
    xs = np.arange(grid.m) * grid.dx
    ys = np.arange(grid.n) * grid.dy
    factors = []
    for spec in specs:
        cx, cy = spec.center
        px, py = spec.momentum
        gx = np.exp(-((xs - cx) ** 2) / (4.0 * spec.width**2) + 1j * px * xs / params.hbar)
        gy = np.exp(-((ys - cy) ** 2) / (4.0 * spec.width**2) + 1j * py * ys / params.hbar)
        factors.append(np.outer(gx, gy))
    amp = factors[0]
    for f in factors[1:]:
        amp = np.multiply.outer(amp, f)
    psi = WaveFunction(grid, params.n_particles, amp.reshape(-1))
    if psi.squared_norm() == 0.0:
        raise QLatticeError("degenerate initial state: all amplitudes underflowed to zero")
    return normalize(psi)
