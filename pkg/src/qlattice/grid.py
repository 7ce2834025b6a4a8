"""Periodic 2D lattice geometry and configuration-space indexing.

The joint state of N particles lives on the discrete configuration space
(grid cells)^N. A configuration assigns one cell to every particle; the
flat index enumerates configurations in row-major order with particle 0's
x index slowest and particle N-1's y index fastest.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import QLatticeError


@dataclass(frozen=True)
class GridSpec:
    """Periodic m x n lattice with mesh widths dx, dy.

    Cell (ax, ay) sits at coordinates (ax*dx, ay*dy); left/right and
    top/bottom edges are identified (toroidal wraparound).
    """

    m: int
    n: int
    dx: float = 1.0
    dy: float = 1.0

    def __post_init__(self):
        if self.m < 2:
            raise QLatticeError(f"grid.m must be >= 2, got {self.m}")
        if self.n < 2:
            raise QLatticeError(f"grid.n must be >= 2, got {self.n}")
        if not self.dx > 0:
            raise QLatticeError(f"grid.dx must be > 0, got {self.dx}")
        if not self.dy > 0:
            raise QLatticeError(f"grid.dy must be > 0, got {self.dy}")

    @property
    def cells(self) -> int:
        return self.m * self.n

    def size(self, n_particles: int) -> int:
        """Number of configurations, (m*n)**N."""
        return self.cells**n_particles

    def contains(self, ax: int, ay: int) -> bool:
        return 0 <= ax < self.m and 0 <= ay < self.n

    def wrap(self, ax: int, ay: int) -> "Cell":
        """Reduce arbitrary integer indices onto the torus."""
        return Cell(ax % self.m, ay % self.n)


@dataclass(frozen=True)
class Cell:
    """One lattice site, 0-based indices."""

    ax: int
    ay: int


@dataclass(frozen=True)
class Configuration:
    """One cell per particle: a single point of configuration space."""

    cells: tuple[Cell, ...]

    def __len__(self) -> int:
        return len(self.cells)


def config_index(cfg: Configuration, grid: GridSpec) -> int:
    """Flat index of a configuration.

    Row-major: digits (a0x, a0y, a1x, a1y, ...) with bases (m, n, m, n, ...),
    particle 0's ax slowest. Bijective onto [0, (m*n)**N).
    """
    idx = 0
    for cell in cfg.cells:
        if not grid.contains(cell.ax, cell.ay):
            raise QLatticeError(f"cell outside grid: ({cell.ax}, {cell.ay})")
        idx = (idx * grid.m + cell.ax) * grid.n + cell.ay
    return idx


def index_to_config(idx: int, grid: GridSpec, n_particles: int) -> Configuration:
    """Inverse of config_index."""
    if not 0 <= idx < grid.size(n_particles):
        raise QLatticeError(f"configuration index {idx} out of range")
    digits = []
    for _ in range(n_particles):
        idx, ay = divmod(idx, grid.n)
        idx, ax = divmod(idx, grid.m)
        digits.append(Cell(ax, ay))
    return Configuration(tuple(reversed(digits)))
