"""Joint wavefunction storage, normalization, marginals and position moments.

The amplitude tensor has one complex entry per configuration. It is kept as
a flat C-ordered array of length (m*n)**N; axis pairs (2k, 2k+1) of the
reshaped view index particle k's (ax, ay). This layout is part of the
package contract (snapshots and the wire format rely on it).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QLatticeError
from .grid import Cell, GridSpec



@dataclass
class WaveFunction:
    """Complex amplitudes over all particle-position configurations."""

    grid: GridSpec
    n_particles: int
    amplitudes: np.ndarray  # complex128, flat, length (m*n)**N

    def __post_init__(self):
        expected = self.grid.size(self.n_particles)
        if self.amplitudes.shape != (expected,):
            raise QLatticeError(
                f"amplitude array has shape {self.amplitudes.shape}, expected ({expected},)"
            )
        if self.amplitudes.dtype != np.complex128:
            self.amplitudes = self.amplitudes.astype(np.complex128)

    def tensor(self) -> np.ndarray:
        """View shaped (m, n, m, n, ...): axes (2k, 2k+1) belong to particle k."""
        return self.amplitudes.reshape((self.grid.m, self.grid.n) * self.n_particles)

    def tensor_shape(self) -> tuple[int, ...]:
        return (self.grid.m, self.grid.n) * self.n_particles

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.n_particles, self.amplitudes.copy())

    def squared_norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def require_finite(self) -> None:
        if not np.all(np.isfinite(self.amplitudes.view(np.float64))):
            raise QLatticeError("wavefunction contains non-finite amplitudes")


@dataclass
class Marginal2D:
    """Single-particle probability field over the grid, indexed [ax, ay]."""

    grid: GridSpec
    values: np.ndarray  # float64, shape (m, n), entries >= 0

    def at(self, cell: Cell) -> float:
        return float(self.values[cell.ax, cell.ay])

    def row_major(self) -> np.ndarray:
        """Flatten with ay as the outer index (export and wire order)."""
        return np.ascontiguousarray(self.values.T).reshape(-1)

    def argmax_cell(self) -> Cell:
        ax, ay = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return Cell(int(ax), int(ay))


def normalize(psi: WaveFunction) -> WaveFunction:
    """Scale so the squared norm is 1; global phase untouched."""
    s = psi.squared_norm()
    if s == 0.0:
        raise QLatticeError("null state: cannot normalize zero wavefunction")
    if not np.isfinite(s):
        raise QLatticeError("wavefunction contains non-finite amplitudes")
    return WaveFunction(psi.grid, psi.n_particles, psi.amplitudes / np.sqrt(s))


def marginal(psi: WaveFunction, k: int) -> Marginal2D:
    """Probability field of particle k: |psi|^2 summed over all other particles."""
    _check_particle(psi, k)
    density = np.abs(psi.tensor()) ** 2
    axes = tuple(a for a in range(2 * psi.n_particles) if a not in (2 * k, 2 * k + 1))
    values = density.sum(axis=axes) if axes else density
    return Marginal2D(psi.grid, values)


def all_marginals(psi: WaveFunction) -> list[Marginal2D]:
    return [marginal(psi, k) for k in range(psi.n_particles)]


def expected_position(psi: WaveFunction, k: int) -> tuple[float, float]:
    """Mean position of particle k in raw (non-wrapped) coordinates."""
    marg = marginal(psi, k)
    g = psi.grid
    px = marg.values.sum(axis=1)
    py = marg.values.sum(axis=0)
    x = float(np.dot(px, np.arange(g.m) * g.dx))
    y = float(np.dot(py, np.arange(g.n) * g.dy))
    return (x, y)


def delta_state(grid: GridSpec, cells: list[Cell] | tuple[Cell, ...]) -> WaveFunction:
    """Unit amplitude on a single configuration (position eigenstate)."""
    from .grid import Configuration, config_index

    n = len(cells)
    amp = np.zeros(grid.size(n), dtype=np.complex128)
    amp[config_index(Configuration(tuple(cells)), grid)] = 1.0
    return WaveFunction(grid, n, amp)


def uniform_state(grid: GridSpec, n_particles: int) -> WaveFunction:
    """Equal real amplitude everywhere, normalized."""
    size = grid.size(n_particles)
    amp = np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128)
    return WaveFunction(grid, n_particles, amp)


def _check_particle(psi: WaveFunction, k: int) -> None:
    if not 0 <= k < psi.n_particles:
        raise QLatticeError(f"particle index {k} out of range [0, {psi.n_particles})")
