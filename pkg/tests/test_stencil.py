"""Cross-checks between the compiled stencil kernels and the numpy
reference path; both must produce the same fields."""

from __future__ import annotations

import numpy as np
import pytest

from qlattice import GridSpec
from qlattice.hamiltonian import stencil_tables
from qlattice.stencil import HAVE_NUMBA, _h_apply_py, _step_py, h_apply, step_apply

from conftest import random_state, simple_params


@pytest.mark.skipif(not HAVE_NUMBA, reason="compiled kernels unavailable")
@pytest.mark.parametrize("m,n,particles", [(3, 3, 1), (4, 3, 2), (3, 2, 3)])
def test_h_apply_matches_reference(m, n, particles):
    grid = GridSpec(m=m, n=n, dx=0.6, dy=1.2)
    params = simple_params(particles, mass=1.3, spring_k=0.8)
    psi = random_state(grid, particles, seed=m * 10 + n)
    v, coefs, extents, strides = stencil_tables(grid, params)
    diag = -2.0 * float(coefs.sum())
    jit_out = np.empty_like(psi.amplitudes)
    ref_out = np.empty_like(psi.amplitudes)
    h_apply(psi.amplitudes, jit_out, v, diag, coefs, extents, strides)
    _h_apply_py(psi.amplitudes, ref_out, v, diag, coefs, extents, strides)
    np.testing.assert_allclose(jit_out, ref_out, rtol=0, atol=1e-13)


@pytest.mark.skipif(not HAVE_NUMBA, reason="compiled kernels unavailable")
def test_step_matches_reference():
    grid = GridSpec(m=4, n=4)
    params = simple_params(2, spring_k=1.0)
    psi = random_state(grid, 2, seed=3)
    v, coefs, extents, strides = stencil_tables(grid, params)
    diag = -2.0 * float(coefs.sum())
    jit_out = np.empty_like(psi.amplitudes)
    ref_out = np.empty_like(psi.amplitudes)
    jit_norm = step_apply(psi.amplitudes, jit_out, v, diag, coefs, extents, strides, 0.01)
    ref_norm = _step_py(psi.amplitudes, ref_out, v, diag, coefs, extents, strides, 0.01)
    np.testing.assert_allclose(jit_out, ref_out, rtol=0, atol=1e-14)
    assert jit_norm == pytest.approx(ref_norm, rel=1e-13)


def test_tables_are_read_only():
    grid = GridSpec(m=3, n=3)
    params = simple_params(2)
    v, coefs, extents, strides = stencil_tables(grid, params)
    for table in (v, coefs, extents, strides):
        with pytest.raises(ValueError):
            table[0] = 1
