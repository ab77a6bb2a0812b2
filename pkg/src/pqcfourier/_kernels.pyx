# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels.

Same contract as `_kernels_py`: in-place operations on (n_rows, 2^n) complex
arrays, one statevector per row, bit k of the column index = qubit k.
Pauli/axis codes: 0 = X, 1 = Y, 2 = Z.
"""

import numpy as np

from libc.math cimport cos, sin

COMPILED = True


def apply_1q(double complex[:, ::1] state, int qubit, u):
    cdef double complex u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    cdef Py_ssize_t n_rows = state.shape[0], dim = state.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << qubit
    cdef Py_ssize_t n_blocks = dim >> (qubit + 1)
    cdef Py_ssize_t n, blk, base, k, i0, i1
    cdef double complex a, b
    with nogil:
        for n in range(n_rows):
            for blk in range(n_blocks):
                base = blk * (stride << 1)
                for k in range(stride):
                    i0 = base + k
                    i1 = i0 + stride
                    a = state[n, i0]
                    b = state[n, i1]
                    state[n, i0] = u00 * a + u01 * b
                    state[n, i1] = u10 * a + u11 * b


def apply_1q_angles(double complex[:, ::1] state, int qubit, int axis, double[::1] angles):
    if axis not in (0, 1, 2):
        raise ValueError(f"axis code {axis} not in (0, 1, 2)")
    cdef Py_ssize_t n_rows = state.shape[0], dim = state.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << qubit
    cdef Py_ssize_t n_blocks = dim >> (qubit + 1)
    cdef Py_ssize_t n, blk, base, k, i0, i1
    cdef double c, s
    cdef double complex a, b, ph0, ph1
    cdef int ax = axis
    with nogil:
        for n in range(n_rows):
            c = cos(0.5 * angles[n])
            s = sin(0.5 * angles[n])
            if ax == 2:
                ph0 = c - 1j * s
                ph1 = c + 1j * s
                for blk in range(n_blocks):
                    base = blk * (stride << 1)
                    for k in range(stride):
                        i0 = base + k
                        i1 = i0 + stride
                        state[n, i0] = ph0 * state[n, i0]
                        state[n, i1] = ph1 * state[n, i1]
            else:
                for blk in range(n_blocks):
                    base = blk * (stride << 1)
                    for k in range(stride):
                        i0 = base + k
                        i1 = i0 + stride
                        a = state[n, i0]
                        b = state[n, i1]
                        if ax == 0:
                            state[n, i0] = c * a - 1j * (s * b)
                            state[n, i1] = c * b - 1j * (s * a)
                        else:
                            state[n, i0] = c * a - s * b
                            state[n, i1] = c * b + s * a


def apply_cnot(double complex[:, ::1] state, int control, int target):
    cdef Py_ssize_t n_rows = state.shape[0], dim = state.shape[1]
    cdef Py_ssize_t cbit = (<Py_ssize_t> 1) << control, tbit = (<Py_ssize_t> 1) << target
    cdef Py_ssize_t n, i, j
    cdef double complex tmp
    with nogil:
        for n in range(n_rows):
            for i in range(dim):
                if (i & cbit) != 0 and (i & tbit) == 0:
                    j = i | tbit
                    tmp = state[n, i]
                    state[n, i] = state[n, j]
                    state[n, j] = tmp


def apply_pauli_rows(double complex[:, ::1] state, rows, int qubit, int pauli):
    if pauli not in (0, 1, 2):
        raise ValueError(f"pauli code {pauli} not in (0, 1, 2)")
    cdef long long[::1] rr = np.ascontiguousarray(rows, dtype=np.int64)
    cdef Py_ssize_t dim = state.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << qubit
    cdef Py_ssize_t n_blocks = dim >> (qubit + 1)
    cdef Py_ssize_t m, blk, base, k, i0, i1, n
    cdef double complex a, b
    cdef int p = pauli
    with nogil:
        for m in range(rr.shape[0]):
            n = <Py_ssize_t> rr[m]
            for blk in range(n_blocks):
                base = blk * (stride << 1)
                for k in range(stride):
                    i0 = base + k
                    i1 = i0 + stride
                    a = state[n, i0]
                    b = state[n, i1]
                    if p == 0:
                        state[n, i0] = b
                        state[n, i1] = a
                    elif p == 1:
                        state[n, i0] = -1j * b
                        state[n, i1] = 1j * a
                    else:
                        state[n, i1] = -b


def expect_z(double complex[:, ::1] state, int qubit):
    cdef Py_ssize_t n_rows = state.shape[0], dim = state.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << qubit
    cdef Py_ssize_t n_blocks = dim >> (qubit + 1)
    cdef Py_ssize_t n, blk, base, k, i0, i1
    out = np.empty(n_rows, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double acc
    cdef double complex a, b
    with nogil:
        for n in range(n_rows):
            acc = 0.0
            for blk in range(n_blocks):
                base = blk * (stride << 1)
                for k in range(stride):
                    i0 = base + k
                    i1 = i0 + stride
                    a = state[n, i0]
                    b = state[n, i1]
                    acc += a.real * a.real + a.imag * a.imag
                    acc -= b.real * b.real + b.imag * b.imag
            ov[n] = acc
    return out


def pauli_imag_inner(double complex[:, ::1] lam, double complex[:, ::1] phi, int qubit, int pauli):
    if pauli not in (0, 1, 2):
        raise ValueError(f"pauli code {pauli} not in (0, 1, 2)")
    cdef Py_ssize_t n_rows = lam.shape[0], dim = lam.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << qubit
    cdef Py_ssize_t n_blocks = dim >> (qubit + 1)
    cdef Py_ssize_t n, blk, base, k, i0, i1
    out = np.empty(n_rows, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double complex acc, la, lb, pa, pb
    cdef int p = pauli
    with nogil:
        for n in range(n_rows):
            acc = 0.0
            for blk in range(n_blocks):
                base = blk * (stride << 1)
                for k in range(stride):
                    i0 = base + k
                    i1 = i0 + stride
                    la = lam[n, i0].conjugate()
                    lb = lam[n, i1].conjugate()
                    pa = phi[n, i0]
                    pb = phi[n, i1]
                    if p == 0:
                        acc += la * pb + lb * pa
                    elif p == 1:
                        acc += 1j * (lb * pa - la * pb)
                    else:
                        acc += la * pa - lb * pb
            ov[n] = acc.imag
    return out


def norm_sq(double complex[:, ::1] state):
    cdef Py_ssize_t n_rows = state.shape[0], dim = state.shape[1]
    cdef Py_ssize_t n, i
    out = np.empty(n_rows, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double acc
    cdef double complex a
    with nogil:
        for n in range(n_rows):
            acc = 0.0
            for i in range(dim):
                a = state[n, i]
                acc += a.real * a.real + a.imag * a.imag
            ov[n] = acc
    return out
