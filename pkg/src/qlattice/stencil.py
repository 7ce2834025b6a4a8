"""Stencil kernels over the flat configuration array.

The hot loop applies, for every configuration index, the diagonal potential
plus the periodic 3-point second difference along each of the 2N axes. A
compiled (numba) implementation walks the flat array once with an odometer
over the mixed-radix digits; the numpy fallback expresses the same
arithmetic with axis rolls. Both are sequential and deterministic, and the
test suite cross-checks them. Set QLATTICE_NO_NUMBA=1 to force the
fallback.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("QLATTICE_NO_NUMBA"):
    HAVE_NUMBA = False
else:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via the env switch
        HAVE_NUMBA = False


def _h_apply_py(psi, out, v, diag, coefs, extents, strides):
    """out <- (v + diag) psi + sum_a coefs[a] (shift_a+ psi + shift_a- psi)."""
    shape = tuple(int(e) for e in extents)
    arr = psi.reshape(shape)
    res = (v + diag).reshape(shape) * arr
    for a in range(len(shape)):
        c = coefs[a]
        if c != 0.0:
            res += c * (np.roll(arr, 1, a) + np.roll(arr, -1, a))
    out[:] = res.reshape(-1)


def _step_py(psi, out, v, diag, coefs, extents, strides, dt_over_hbar):
    h_psi = np.empty_like(psi)
    _h_apply_py(psi, h_psi, v, diag, coefs, extents, strides)
    out[:] = psi - (1j * dt_over_hbar) * h_psi
    return float(np.vdot(out, out).real)


if HAVE_NUMBA:

    @njit(cache=True)
    def _h_apply_jit(psi, out, v, diag, coefs, extents, strides):  # pragma: no cover
        n_axes = extents.shape[0]
        size = psi.shape[0]
        digits = np.zeros(n_axes, dtype=np.int64)
        for i in range(size):
            acc = (v[i] + diag) * psi[i]
            for a in range(n_axes):
                s = strides[a]
                span = extents[a] * s
                up = i + s if digits[a] + 1 < extents[a] else i + s - span
                dn = i - s if digits[a] >= 1 else i - s + span
                acc += coefs[a] * (psi[up] + psi[dn])
            out[i] = acc
            a = n_axes - 1
            while a >= 0:
                digits[a] += 1
                if digits[a] < extents[a]:
                    break
                digits[a] = 0
                a -= 1

    @njit(cache=True)
    def _step_jit(psi, out, v, diag, coefs, extents, strides, dt_over_hbar):  # pragma: no cover
        n_axes = extents.shape[0]
        size = psi.shape[0]
        digits = np.zeros(n_axes, dtype=np.int64)
        norm_sq = 0.0
        for i in range(size):
            acc = (v[i] + diag) * psi[i]
            for a in range(n_axes):
                s = strides[a]
                span = extents[a] * s
                up = i + s if digits[a] + 1 < extents[a] else i + s - span
                dn = i - s if digits[a] >= 1 else i - s + span
                acc += coefs[a] * (psi[up] + psi[dn])
            value = psi[i] - 1j * dt_over_hbar * acc
            out[i] = value
            norm_sq += value.real * value.real + value.imag * value.imag
            a = n_axes - 1
            while a >= 0:
                digits[a] += 1
                if digits[a] < extents[a]:
                    break
                digits[a] = 0
                a -= 1
        return norm_sq


def h_apply(psi, out, v, diag, coefs, extents, strides) -> None:
    """Hamiltonian-style stencil application into a preallocated output."""
    if HAVE_NUMBA:
        _h_apply_jit(psi, out, v, diag, coefs, extents, strides)
    else:
        _h_apply_py(psi, out, v, diag, coefs, extents, strides)


def step_apply(psi, out, v, diag, coefs, extents, strides, dt_over_hbar) -> float:
    """Fused explicit step: out <- psi - i dt/hbar (H psi), without the final
    renormalization. Returns the squared norm of out."""
    if HAVE_NUMBA:
        return float(
            _step_jit(psi, out, v, diag, coefs, extents, strides, dt_over_hbar)
        )
    return _step_py(psi, out, v, diag, coefs, extents, strides, dt_over_hbar)
