"""Time stepping: first-order explicit update, step-size heuristic, and an
exact dense-exponential oracle for small states.

The production path advances psi by psi <- normalize(psi - i dt/hbar H psi).
The update is conditionally stable; per-step renormalization keeps the norm
pinned and choose_dt picks dt small enough that single-step error stays
second order in dt. The oracle assembles the Hamiltonian matrix explicitly
and evolves by eigendecomposition, feasible only at a few thousand
amplitudes; it exists to verify the cheap path, not to replace it.
"""

from __future__ import annotations

import numpy as np

from . import stencil
from .errors import QLatticeError, UnstableStepError
from .grid import GridSpec
from .hamiltonian import apply_hamiltonian, energy_bound, stencil_tables
from .model import ModelParams
from .state import WaveFunction

ORACLE_MAX_AMPLITUDES = 4096


def step(psi: WaveFunction, params: ModelParams, dt: float) -> tuple[WaveFunction, float]:
    """One explicit Euler step, renormalized.

    Returns (new wavefunction, squared norm before renormalization). The
    pre-normalization norm is the step's health indicator: it drifts from 1
    quadratically in dt and explodes when dt is too large.
    """
    if dt < 0:
        raise QLatticeError(f"dt must be >= 0, got {dt}")
    if dt == 0.0:
        return psi.copy(), psi.squared_norm()
    if params.n_particles != psi.n_particles:
        raise QLatticeError("model particle count does not match wavefunction")
    v, coefs, extents, strides = stencil_tables(psi.grid, params)
    diag = -2.0 * float(coefs.sum())
    amp = np.empty_like(psi.amplitudes)
    pre_norm = stencil.step_apply(
        psi.amplitudes, amp, v, diag, coefs, extents, strides, dt / params.hbar
    )
    if not np.isfinite(pre_norm) or pre_norm == 0.0:
        raise UnstableStepError(pre_norm)
    amp /= np.sqrt(pre_norm)
    return WaveFunction(psi.grid, psi.n_particles, amp), pre_norm


def choose_dt(grid: GridSpec, params: ModelParams, alpha: float = 0.1) -> float:
    """Stability-motivated step size: alpha * hbar over an eigenvalue bound.

    The bound combines each particle's maximal discrete kinetic energy with
    every spring stretched across the full grid diagonal, so the returned dt
    keeps |E dt / hbar| <= alpha for every eigenvalue E.
    """
    if not 0 < alpha <= 1:
        raise QLatticeError(f"alpha must be in (0, 1], got {alpha}")
    return alpha * params.hbar / energy_bound(grid, params)


def dense_hamiltonian(grid: GridSpec, params: ModelParams) -> np.ndarray:
    """Explicit Hamiltonian matrix, built column-by-column on basis vectors."""
    size = grid.size(params.n_particles)
    if size > ORACLE_MAX_AMPLITUDES:
        raise QLatticeError(
            f"oracle scale exceeded: {size} amplitudes > {ORACLE_MAX_AMPLITUDES}"
        )
    h = np.empty((size, size), dtype=np.complex128)
    basis = np.zeros(size, dtype=np.complex128)
    for j in range(size):
        basis[j] = 1.0
        h[:, j] = apply_hamiltonian(
            WaveFunction(grid, params.n_particles, basis), params
        )
        basis[j] = 0.0
    return h


def dense_oracle_evolve(psi: WaveFunction, params: ModelParams, t: float) -> WaveFunction:
    """Exact evolution exp(-i H t / hbar) psi via eigendecomposition."""
    size = psi.grid.size(psi.n_particles)
    if size > ORACLE_MAX_AMPLITUDES:
        raise QLatticeError(
            f"oracle scale exceeded: {size} amplitudes > {ORACLE_MAX_AMPLITUDES}"
        )
    if t == 0.0:
        return psi.copy()
    h = dense_hamiltonian(psi.grid, params)
    # H is Hermitian, so eigh gives an exact unitary propagator.
    eigvals, eigvecs = np.linalg.eigh(h)
    phases = np.exp(-1j * eigvals * t / params.hbar)
    amp = eigvecs @ (phases * (eigvecs.conj().T @ psi.amplitudes))
    return WaveFunction(psi.grid, psi.n_particles, amp)
