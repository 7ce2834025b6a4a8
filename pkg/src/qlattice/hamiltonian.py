"""Hamiltonian application: finite-difference kinetic terms plus the
common-center harmonic binding potential.

Kinetic energy uses the 3-point central second difference per coordinate
with periodic wraparound, so each particle contributes a 5-point stencil
acting on its own (ax, ay) axis pair of the amplitude tensor.

The binding potential attaches every particle by a zero-rest-length spring
to the force-balance center, the spring-constant-weighted mean position.
It is diagonal in the position basis and separates into an x part and a
y part, each a small (grid side)^N table that broadcasts over the full
configuration tensor.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import stencil
from .errors import QLatticeError
from .grid import Configuration, GridSpec
from .model import ModelParams, PotentialMode
from .state import WaveFunction, _check_particle


def center_of_force(
    cfg: Configuration, grid: GridSpec, params: ModelParams
) -> tuple[float, float]:
    """Spring-constant-weighted mean position of a configuration.

    In minimal-image mode every particle is first shifted by whole grid
    periods to the representative nearest particle 0.
    """
    total = params.total_spring()
    if total <= 0:
        raise QLatticeError("degenerate binding: total spring constant is zero")
    xs = np.array([c.ax * grid.dx for c in cfg.cells])
    ys = np.array([c.ay * grid.dy for c in cfg.cells])
    if params.potential_mode is PotentialMode.MINIMAL_IMAGE:
        xs = _nearest_image(xs, xs[0], grid.m * grid.dx)
        ys = _nearest_image(ys, ys[0], grid.n * grid.dy)
    ks = np.array([p.spring_k for p in params.particles])
    return (float(np.dot(ks, xs) / total), float(np.dot(ks, ys) / total))


def potential_at(cfg: Configuration, grid: GridSpec, params: ModelParams) -> float:
    """Binding energy of one configuration: sum_i (k_i/2)|q_i - q_c|^2."""
    if params.n_particles == 1:
        return 0.0
    qc_x, qc_y = center_of_force(cfg, grid, params)
    xs = np.array([c.ax * grid.dx for c in cfg.cells])
    ys = np.array([c.ay * grid.dy for c in cfg.cells])
    if params.potential_mode is PotentialMode.MINIMAL_IMAGE:
        xs = _nearest_image(xs, xs[0], grid.m * grid.dx)
        ys = _nearest_image(ys, ys[0], grid.n * grid.dy)
    ks = np.array([p.spring_k for p in params.particles])
    return float(np.dot(ks, (xs - qc_x) ** 2 + (ys - qc_y) ** 2) / 2.0)


def _nearest_image(coords: np.ndarray, anchor: float | np.ndarray, period: float) -> np.ndarray:
    """Shift coordinates by whole periods to the image nearest the anchor."""
    return coords - period * np.round((coords - anchor) / period)


@lru_cache(maxsize=16)
def potential_fields(grid: GridSpec, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Separable halves of the potential table.

    Returns (vx, vy): vx has shape (m,)*N over all particles' ax indices,
    vy has shape (n,)*N over the ay indices; the full diagonal potential is
    their broadcast sum over the configuration tensor.
    """
    n = params.n_particles
    ks = [p.spring_k for p in params.particles]
    vx = _axis_potential(grid.m, grid.dx, ks, params.potential_mode)
    vy = _axis_potential(grid.n, grid.dy, ks, params.potential_mode)
    if n == 1:
        # A single particle coincides with its own force center.
        vx = np.zeros_like(vx)
        vy = np.zeros_like(vy)
    vx.setflags(write=False)
    vy.setflags(write=False)
    return vx, vy


def _axis_potential(
    side: int, delta: float, ks: list[float], mode: PotentialMode
) -> np.ndarray:
    n = len(ks)
    coords = np.arange(side) * delta
    # One coordinate array per particle, broadcastable to shape (side,)*N.
    per_particle = []
    for i in range(n):
        shape = [1] * n
        shape[i] = side
        per_particle.append(coords.reshape(shape))
    if mode is PotentialMode.MINIMAL_IMAGE:
        period = side * delta
        per_particle = [
            _nearest_image(c, per_particle[0], period) for c in per_particle
        ]
    total = sum(ks)
    if total <= 0:
        return np.zeros((side,) * n)
    qc = sum(k * c for k, c in zip(ks, per_particle)) / total
    v = sum(0.5 * k * (c - qc) ** 2 for k, c in zip(ks, per_particle))
    return np.asarray(v, dtype=np.float64)


@lru_cache(maxsize=16)
def stencil_tables(
    grid: GridSpec, params: ModelParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Flat-array ingredients for the stencil kernels.

    Returns (v, coefs, extents, strides): the full diagonal potential, the
    per-axis kinetic coefficient -hbar^2/(2 m_k delta^2), and the tensor
    geometry. Each axis additionally contributes -2 coef to the diagonal;
    kernels receive that shift separately so the kinetic-only application
    can reuse the same tables.
    """
    n = params.n_particles
    vx, vy = potential_fields(grid, params)
    sx, sy = (grid.m, 1) * n, (1, grid.n) * n
    v = (vx.reshape(sx) + vy.reshape(sy)).reshape(-1)
    coefs = np.empty(2 * n, dtype=np.float64)
    for k, p in enumerate(params.particles):
        coef = -(params.hbar**2) / (2.0 * p.mass)
        coefs[2 * k] = coef / grid.dx**2
        coefs[2 * k + 1] = coef / grid.dy**2
    extents = np.array((grid.m, grid.n) * n, dtype=np.int64)
    strides = np.empty(2 * n, dtype=np.int64)
    acc = 1
    for a in range(2 * n - 1, -1, -1):
        strides[a] = acc
        acc *= extents[a]
    for table in (v, coefs, extents, strides):
        table.setflags(write=False)
    return v, coefs, extents, strides


def apply_kinetic(psi: WaveFunction, k: int, params: ModelParams) -> np.ndarray:
    """Field p_k^2/(2 m_k) psi: (-hbar^2/2m_k) times the periodic 5-point
    Laplacian acting on particle k's axis pair. Returns the flat array;
    the input is untouched."""
    _check_particle(psi, k)
    _, coefs, extents, strides = stencil_tables(psi.grid, params)
    only_k = np.zeros_like(coefs)
    only_k[2 * k] = coefs[2 * k]
    only_k[2 * k + 1] = coefs[2 * k + 1]
    diag = -2.0 * (only_k[2 * k] + only_k[2 * k + 1])
    out = np.empty_like(psi.amplitudes)
    zero_v = np.zeros(psi.amplitudes.shape[0], dtype=np.float64)
    stencil.h_apply(psi.amplitudes, out, zero_v, diag, only_k, extents, strides)
    return out


def apply_hamiltonian(psi: WaveFunction, params: ModelParams) -> np.ndarray:
    """H psi = sum_k p_k^2/(2 m_k) psi + V psi, as a flat array."""
    if params.n_particles != psi.n_particles:
        raise QLatticeError("model particle count does not match wavefunction")
    v, coefs, extents, strides = stencil_tables(psi.grid, params)
    diag = -2.0 * float(coefs.sum())
    out = np.empty_like(psi.amplitudes)
    stencil.h_apply(psi.amplitudes, out, v, diag, coefs, extents, strides)
    return out


def kinetic_energy(psi: WaveFunction, k: int, params: ModelParams) -> float:
    """<psi| p_k^2/(2 m_k) |psi>, returned as its real part."""
    field = apply_kinetic(psi, k, params)
    value = np.vdot(psi.amplitudes, field)
    return float(value.real)


def potential_energy(psi: WaveFunction, params: ModelParams) -> float:
    """<psi| V |psi> over the binding potential."""
    v, _, _, _ = stencil_tables(psi.grid, params)
    density = np.abs(psi.amplitudes) ** 2
    return float(density @ v)


def total_energy(psi: WaveFunction, params: ModelParams) -> float:
    """<psi|H|psi>: all kinetic expectations plus the potential expectation."""
    kin = sum(kinetic_energy(psi, k, params) for k in range(psi.n_particles))
    return kin + potential_energy(psi, params)


def energy_bound(grid: GridSpec, params: ModelParams) -> float:
    """Cheap upper bound on |H| eigenvalues.

    Kinetic: each particle's discrete p^2/2m tops out at
    2 hbar^2/m (1/dx^2 + 1/dy^2). Potential: every spring stretched across
    the full grid diagonal.
    """
    kin = sum(
        2.0 * params.hbar**2 / p.mass * (1.0 / grid.dx**2 + 1.0 / grid.dy**2)
        for p in params.particles
    )
    diag_sq = (grid.m * grid.dx) ** 2 + (grid.n * grid.dy) ** 2
    vmax = sum(0.5 * p.spring_k * diag_sq for p in params.particles)
    return kin + vmax
