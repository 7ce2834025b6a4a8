from __future__ import annotations

import numpy as np
import pytest

from qlattice import (
    Cell,
    Configuration,
    GridSpec,
    ModelParams,
    ParticleSpec,
    PotentialMode,
    WaveFunction,
)
from qlattice.errors import QLatticeError
from qlattice.evolve import dense_hamiltonian
from qlattice.grid import config_index
from qlattice.hamiltonian import (
    apply_hamiltonian,
    apply_kinetic,
    center_of_force,
    energy_bound,
    kinetic_energy,
    potential_at,
    potential_energy,
    total_energy,
)
from qlattice.measure import collapse
from qlattice.initial import GaussianSpec, gaussian_product_state
from qlattice.state import delta_state, uniform_state

from conftest import random_state, simple_params


def cfg(*cells: tuple[int, int]) -> Configuration:
    return Configuration(tuple(Cell(ax, ay) for ax, ay in cells))


# ---------------------------------------------------------------- kinetic


def test_kinetic_of_uniform_state_is_zero():
    grid = GridSpec(m=4, n=4)
    psi = uniform_state(grid, 2)
    params = simple_params(2)
    for k in range(2):
        np.testing.assert_allclose(apply_kinetic(psi, k, params), 0.0, atol=1e-15)


def test_kinetic_delta_stencil_values():
    # Hand-applied 5-point stencil: center (1/2)(2/dx^2 + 2/dy^2) = 2,
    # the four particle-k neighbors -1/2 each, everything else 0.
    grid = GridSpec(m=4, n=4)
    params = simple_params(2)
    psi = delta_state(grid, [Cell(1, 1), Cell(3, 2)])
    field = apply_kinetic(psi, 0, params)
    center = config_index(cfg((1, 1), (3, 2)), grid)
    assert field[center] == pytest.approx(2.0)
    neighbors = [(0, 1), (2, 1), (1, 0), (1, 2)]
    for ax, ay in neighbors:
        idx = config_index(cfg((ax, ay), (3, 2)), grid)
        assert field[idx] == pytest.approx(-0.5)
    touched = [center] + [config_index(cfg(c, (3, 2)), grid) for c in neighbors]
    rest = np.delete(field, touched)
    np.testing.assert_allclose(rest, 0.0, atol=1e-15)


def test_kinetic_neighbors_wrap_periodically():
    grid = GridSpec(m=4, n=4)
    params = simple_params(1)
    psi = delta_state(grid, [Cell(0, 0)])
    field = apply_kinetic(psi, 0, params)
    # Left neighbor of ax=0 is ax=3; top neighbor of ay=0 is ay=3.
    assert field[config_index(cfg((3, 0)), grid)] == pytest.approx(-0.5)
    assert field[config_index(cfg((0, 3)), grid)] == pytest.approx(-0.5)


def test_kinetic_plane_wave_is_eigenvector():
    m, n = 5, 4
    grid = GridSpec(m=m, n=n, dx=0.7, dy=1.3)
    params = ModelParams(hbar=2.0, particles=(ParticleSpec(mass=1.5, spring_k=1.0),))
    ax = np.arange(m)
    wave = np.exp(2j * np.pi * ax / m)
    amp = np.repeat(wave, n) / np.sqrt(m * n)
    psi = WaveFunction(grid, 1, amp.astype(np.complex128))
    field = apply_kinetic(psi, 0, params)
    eig = (params.hbar**2 / (2 * 1.5)) * (2 - 2 * np.cos(2 * np.pi / m)) / grid.dx**2
    np.testing.assert_allclose(field, eig * psi.amplitudes, atol=1e-12)


def test_kinetic_particle_index_checked():
    psi = uniform_state(GridSpec(m=3, n=3), 1)
    with pytest.raises(QLatticeError, match="particle index"):
        apply_kinetic(psi, 1, simple_params(1))


# ------------------------------------------------------- center of force


def test_center_of_force_coincident():
    grid = GridSpec(m=6, n=6)
    params = simple_params(3)
    assert center_of_force(cfg((2, 3), (2, 3), (2, 3)), grid, params) == pytest.approx((2.0, 3.0))


def test_center_of_force_midpoint():
    grid = GridSpec(m=6, n=6)
    params = simple_params(2)
    assert center_of_force(cfg((0, 1), (2, 1)), grid, params) == pytest.approx((1.0, 1.0))


def test_center_of_force_weighted():
    grid = GridSpec(m=6, n=6)
    params = ModelParams(
        hbar=1.0,
        particles=(
            ParticleSpec(mass=1.0, spring_k=1.0),
            ParticleSpec(mass=1.0, spring_k=2.0),
            ParticleSpec(mass=1.0, spring_k=3.0),
        ),
    )
    qc = center_of_force(cfg((0, 0), (1, 0), (2, 0)), grid, params)
    assert qc[0] == pytest.approx(4.0 / 3.0)
    assert qc[1] == pytest.approx(0.0)


def test_center_of_force_degenerate():
    grid = GridSpec(m=4, n=4)
    params = ModelParams(hbar=1.0, particles=(ParticleSpec(mass=1.0, spring_k=0.0),))
    with pytest.raises(QLatticeError, match="degenerate binding"):
        center_of_force(cfg((1, 1)), grid, params)


def test_center_of_force_minimal_image():
    # Particles at opposite edges are neighbors across the seam.
    grid = GridSpec(m=8, n=8)
    params = ModelParams(
        hbar=1.0,
        particles=(
            ParticleSpec(mass=1.0, spring_k=1.0),
            ParticleSpec(mass=1.0, spring_k=1.0),
        ),
        potential_mode=PotentialMode.MINIMAL_IMAGE,
    )
    qc = center_of_force(cfg((0, 0), (7, 0)), grid, params)
    # x=7 maps to the image at -1; midpoint is -0.5.
    assert qc[0] == pytest.approx(-0.5)


# -------------------------------------------------------------- potential


def test_potential_zero_when_coincident():
    grid = GridSpec(m=6, n=6)
    params = simple_params(3)
    assert potential_at(cfg((4, 4), (4, 4), (4, 4)), grid, params) == pytest.approx(0.0)


def test_potential_single_particle_always_zero():
    grid = GridSpec(m=4, n=4)
    params = ModelParams(hbar=1.0, particles=(ParticleSpec(mass=1.0, spring_k=3.0),))
    for ax in range(4):
        for ay in range(4):
            assert potential_at(cfg((ax, ay)), grid, params) == 0.0


def test_potential_two_particle_separation():
    # Equal springs k, separation d along x: V = k d^2 / 4.
    grid = GridSpec(m=8, n=8, dx=0.5)
    k = 2.5
    params = ModelParams(
        hbar=1.0,
        particles=(
            ParticleSpec(mass=1.0, spring_k=k),
            ParticleSpec(mass=1.0, spring_k=k),
        ),
    )
    d = 3 * grid.dx
    v = potential_at(cfg((0, 2), (3, 2)), grid, params)
    assert v == pytest.approx(k * d**2 / 4)


def test_potential_translation_invariance_exact():
    # Dyadic spacings and spring sum, so the shifted arithmetic is exact.
    grid = GridSpec(m=8, n=8, dx=0.5, dy=0.25)
    params = ModelParams(
        hbar=1.0,
        particles=(
            ParticleSpec(mass=1.0, spring_k=1.0),
            ParticleSpec(mass=1.0, spring_k=1.0),
            ParticleSpec(mass=1.0, spring_k=2.0),
        ),
    )
    base = cfg((1, 2), (3, 0), (2, 5))
    shifted = cfg((2, 3), (4, 1), (3, 6))
    assert potential_at(base, grid, params) == potential_at(shifted, grid, params)


def test_potential_minimal_image_sees_through_seam():
    grid = GridSpec(m=8, n=8)
    particles = (
        ParticleSpec(mass=1.0, spring_k=1.0),
        ParticleSpec(mass=1.0, spring_k=1.0),
    )
    raw = ModelParams(hbar=1.0, particles=particles)
    wrapped = ModelParams(
        hbar=1.0, particles=particles, potential_mode=PotentialMode.MINIMAL_IMAGE
    )
    seam = cfg((0, 0), (7, 0))
    assert potential_at(seam, grid, raw) == pytest.approx(49.0 / 4.0)
    assert potential_at(seam, grid, wrapped) == pytest.approx(1.0 / 4.0)


def test_potential_energy_matches_pointwise_sum():
    grid = GridSpec(m=3, n=3)
    params = simple_params(2, spring_k=0.8)
    psi = random_state(grid, 2, seed=21)
    expected = 0.0
    from qlattice.grid import index_to_config

    for idx in range(grid.size(2)):
        c = index_to_config(idx, grid, 2)
        expected += potential_at(c, grid, params) * abs(psi.amplitudes[idx]) ** 2
    assert potential_energy(psi, params) == pytest.approx(expected, rel=1e-12)


# ------------------------------------------------------------ hamiltonian


def test_free_uniform_state_annihilated():
    grid = GridSpec(m=4, n=4)
    params = ModelParams(hbar=1.0, particles=(ParticleSpec(mass=1.0, spring_k=0.0),))
    psi = uniform_state(grid, 1)
    np.testing.assert_allclose(apply_hamiltonian(psi, params), 0.0, atol=1e-15)


def test_coincident_delta_feels_no_potential():
    grid = GridSpec(m=4, n=4)
    params = simple_params(2, spring_k=3.0)
    psi = delta_state(grid, [Cell(1, 1), Cell(1, 1)])
    h_psi = apply_hamiltonian(psi, params)
    kin = apply_kinetic(psi, 0, params) + apply_kinetic(psi, 1, params)
    center = config_index(cfg((1, 1), (1, 1)), grid)
    assert h_psi[center] == pytest.approx(kin[center])


def test_hermitian_against_dense_matrix(grid3):
    params = simple_params(2, spring_k=1.0)
    h = dense_hamiltonian(grid3, params)
    scale = energy_bound(grid3, params)
    assert np.abs(h - h.conj().T).max() < 1e-10 * scale


def test_hermiticity_inner_products(grid3):
    params = simple_params(2, spring_k=1.3)
    scale = energy_bound(grid3, params)
    for seed in range(20):
        psi = random_state(grid3, 2, seed=seed)
        phi = random_state(grid3, 2, seed=seed + 1000)
        lhs = np.vdot(phi.amplitudes, apply_hamiltonian(psi, params))
        rhs = np.vdot(psi.amplitudes, apply_hamiltonian(phi, params))
        assert abs(lhs - np.conj(rhs)) <= 1e-10 * scale


def test_linearity(grid3):
    params = simple_params(2)
    rng = np.random.default_rng(17)
    psi = random_state(grid3, 2, seed=42)
    phi = random_state(grid3, 2, seed=43)
    a = complex(rng.standard_normal(), rng.standard_normal())
    b = complex(rng.standard_normal(), rng.standard_normal())
    combo = WaveFunction(grid3, 2, a * psi.amplitudes + b * phi.amplitudes)
    lhs = apply_hamiltonian(combo, params)
    rhs = a * apply_hamiltonian(psi, params) + b * apply_hamiltonian(phi, params)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_particle_count_mismatch():
    psi = uniform_state(GridSpec(m=3, n=3), 2)
    with pytest.raises(QLatticeError, match="particle count"):
        apply_hamiltonian(psi, simple_params(3))


# ----------------------------------------------------------- observables


def test_kinetic_energy_uniform_zero():
    psi = uniform_state(GridSpec(m=4, n=4), 2)
    assert kinetic_energy(psi, 0, simple_params(2)) == pytest.approx(0.0, abs=1e-14)


def test_kinetic_energy_delta_exact():
    # <delta|p^2/2m|delta> = hbar^2 (1/dx^2 + 1/dy^2) / m = 2 here.
    grid = GridSpec(m=4, n=4)
    psi = delta_state(grid, [Cell(2, 2)])
    params = ModelParams(hbar=1.0, particles=(ParticleSpec(mass=1.0, spring_k=1.0),))
    assert kinetic_energy(psi, 0, params) == pytest.approx(2.0)


def test_kinetic_energy_matches_dense_quadratic_form(grid3):
    params = simple_params(2, spring_k=0.0001)
    psi = random_state(grid3, 2, seed=9)
    # Dense operator for particle 0 alone: build from the kinetic field.
    size = grid3.size(2)
    dense = np.empty((size, size), dtype=np.complex128)
    basis = np.zeros(size, dtype=np.complex128)
    for j in range(size):
        basis[j] = 1.0
        dense[:, j] = apply_kinetic(WaveFunction(grid3, 2, basis), 0, params)
        basis[j] = 0.0
    expected = np.vdot(psi.amplitudes, dense @ psi.amplitudes).real
    assert kinetic_energy(psi, 0, params) == pytest.approx(expected, abs=1e-10)


def test_kinetic_energy_nonnegative_and_real(grid4):
    params = simple_params(2)
    for seed in range(5):
        psi = random_state(grid4, 2, seed=seed)
        field = np.vdot(psi.amplitudes, apply_kinetic(psi, 0, params))
        assert abs(field.imag) < 1e-10
        assert field.real >= -1e-12


def test_total_energy_free_uniform_zero():
    grid = GridSpec(m=4, n=4)
    params = ModelParams(
        hbar=1.0,
        particles=(ParticleSpec(mass=1.0, spring_k=0.0), ParticleSpec(mass=1.0, spring_k=1e-9)),
    )
    psi = uniform_state(grid, 2)
    assert total_energy(psi, params) == pytest.approx(0.0, abs=1e-12)


def test_total_energy_matches_dense(grid3):
    params = simple_params(2, spring_k=0.7)
    psi = random_state(grid3, 2, seed=31)
    h = dense_hamiltonian(grid3, params)
    expected = np.vdot(psi.amplitudes, h @ psi.amplitudes).real
    assert total_energy(psi, params) == pytest.approx(expected, abs=1e-10)


def test_collapse_raises_energy_of_narrow_state():
    # A smooth packet has lower energy than its position eigenstate.
    grid = GridSpec(m=6, n=6)
    params = simple_params(3, spring_k=0.5)
    specs = [GaussianSpec(center=(2.5, 2.5), width=1.2) for _ in range(3)]
    psi = gaussian_product_state(grid, params, specs)
    before = total_energy(psi, params)
    from qlattice.state import marginal

    peak = marginal(psi, 0).argmax_cell()
    after = total_energy(collapse(psi, 0, peak), params)
    assert after > before


def test_energy_bound_dominates_spectrum(grid3):
    params = simple_params(2, spring_k=1.0)
    h = dense_hamiltonian(grid3, params)
    eigs = np.linalg.eigvalsh(h)
    assert energy_bound(grid3, params) >= eigs.max()
