"""Pure-numpy statevector kernels.

Drop-in fallback for the compiled `_kernels` extension: identical function
signatures and in-place semantics. States are (n_rows, 2^n_qubits) complex128
arrays, one independent statevector per row; bit k of the column index is
qubit k.

Pauli/axis codes: 0 = X, 1 = Y, 2 = Z.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def _halves(state: np.ndarray, qubit: int):
    n_rows, dim = state.shape
    lo = 1 << qubit
    view = state.reshape(n_rows, dim >> (qubit + 1), 2, lo)
    return view[:, :, 0, :], view[:, :, 1, :]


def apply_1q(state: np.ndarray, qubit: int, u: np.ndarray) -> None:
    """state <- (U on `qubit`) state, same 2x2 U for every row."""
    a, b = _halves(state, qubit)
    new_a = u[0, 0] * a + u[0, 1] * b
    b *= u[1, 1]
    b += u[1, 0] * a
    a[...] = new_a


def apply_1q_angles(state: np.ndarray, qubit: int, axis: int, angles: np.ndarray) -> None:
    """Per-row rotation exp(-i*angle/2 * sigma_axis) on `qubit`."""
    a, b = _halves(state, qubit)
    c = np.cos(0.5 * angles)[:, None, None]
    s = np.sin(0.5 * angles)[:, None, None]
    if axis == 0:
        new_a = c * a - 1j * (s * b)
        b *= c
        b -= 1j * (s * a)
    elif axis == 1:
        new_a = c * a - s * b
        b *= c
        b += s * a
    elif axis == 2:
        new_a = (c - 1j * s) * a
        b *= c + 1j * s
    else:
        raise ValueError(f"axis code {axis} not in (0, 1, 2)")
    a[...] = new_a


def apply_cnot(state: np.ndarray, control: int, target: int) -> None:
    """state <- CNOT(control, target) state."""
    dim = state.shape[1]
    idx = np.arange(dim)
    i0 = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    i1 = i0 | (1 << target)
    tmp = state[:, i0].copy()
    state[:, i0] = state[:, i1]
    state[:, i1] = tmp


def apply_pauli_rows(state: np.ndarray, rows: np.ndarray, qubit: int, pauli: int) -> None:
    """Apply a Pauli on `qubit` to the given subset of rows only."""
    if len(rows) == 0:
        return
    sub = state[rows]
    a, b = _halves(sub, qubit)
    if pauli == 0:
        tmp = a.copy()
        a[...] = b
        b[...] = tmp
    elif pauli == 1:
        tmp = a.copy()
        a[...] = -1j * b
        b[...] = 1j * tmp
    elif pauli == 2:
        b *= -1.0
    else:
        raise ValueError(f"pauli code {pauli} not in (0, 1, 2)")
    state[rows] = sub


def expect_z(state: np.ndarray, qubit: int) -> np.ndarray:
    """Per-row <Z> on `qubit`: sum of |amp|^2 signed by the qubit's bit."""
    a, b = _halves(state, qubit)
    pa = np.einsum("nhl,nhl->n", a, a.conj()).real
    pb = np.einsum("nhl,nhl->n", b, b.conj()).real
    return pa - pb


def pauli_imag_inner(lam: np.ndarray, phi: np.ndarray, qubit: int, pauli: int) -> np.ndarray:
    """Per-row Im <lam | sigma_pauli on `qubit` | phi>."""
    la, lb = _halves(lam, qubit)
    pa, pb = _halves(phi, qubit)
    if pauli == 0:
        val = np.einsum("nhl,nhl->n", la.conj(), pb) + np.einsum("nhl,nhl->n", lb.conj(), pa)
    elif pauli == 1:
        val = 1j * (np.einsum("nhl,nhl->n", lb.conj(), pa) - np.einsum("nhl,nhl->n", la.conj(), pb))
    elif pauli == 2:
        val = np.einsum("nhl,nhl->n", la.conj(), pa) - np.einsum("nhl,nhl->n", lb.conj(), pb)
    else:
        raise ValueError(f"pauli code {pauli} not in (0, 1, 2)")
    return val.imag.copy()


def norm_sq(state: np.ndarray) -> np.ndarray:
    """Per-row squared norm."""
    return np.einsum("nd,nd->n", state, state.conj()).real
