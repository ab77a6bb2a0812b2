"""Compiled Cython kernels vs the pure-numpy fallback on identical inputs."""

import subprocess
import sys

import numpy as np
import pytest

from pqcfourier import _kernels_py
from pqcfourier.backend import backend_name, kernels
from pqcfourier.simulator import rotation_matrix

pytestmark = pytest.mark.skipif(
    not kernels.COMPILED, reason="compiled extension not built; nothing to compare"
)


def _random_state(rng, n_rows, n_qubits):
    dim = 1 << n_qubits
    state = rng.normal(size=(n_rows, dim)) + 1j * rng.normal(size=(n_rows, dim))
    state /= np.linalg.norm(state, axis=1, keepdims=True)
    return np.ascontiguousarray(state, dtype=np.complex128)


@pytest.mark.parametrize("n_qubits", [1, 3, 5])
def test_apply_1q_parity(n_qubits):
    rng = np.random.default_rng(n_qubits)
    for axis in range(3):
        for qubit in range(n_qubits):
            state = _random_state(rng, 7, n_qubits)
            other = state.copy()
            u = rotation_matrix(axis, float(rng.uniform(-3, 3)))
            kernels.apply_1q(state, qubit, u)
            _kernels_py.apply_1q(other, qubit, u)
            assert np.allclose(state, other, atol=1e-14)


@pytest.mark.parametrize("axis", [0, 1, 2])
def test_apply_1q_angles_parity(axis):
    rng = np.random.default_rng(17 + axis)
    state = _random_state(rng, 9, 4)
    other = state.copy()
    angles = rng.uniform(-4, 4, 9)
    kernels.apply_1q_angles(state, 2, axis, angles)
    _kernels_py.apply_1q_angles(other, 2, axis, angles)
    assert np.allclose(state, other, atol=1e-14)


def test_apply_cnot_parity():
    rng = np.random.default_rng(23)
    for control, target in [(0, 1), (1, 0), (3, 1), (0, 3)]:
        state = _random_state(rng, 5, 4)
        other = state.copy()
        kernels.apply_cnot(state, control, target)
        _kernels_py.apply_cnot(other, control, target)
        assert np.allclose(state, other, atol=0)


@pytest.mark.parametrize("pauli", [0, 1, 2])
def test_apply_pauli_rows_parity(pauli):
    rng = np.random.default_rng(31 + pauli)
    state = _random_state(rng, 11, 3)
    other = state.copy()
    rows = np.sort(rng.choice(11, size=4, replace=False)).astype(np.int64)
    kernels.apply_pauli_rows(state, rows, 1, pauli)
    _kernels_py.apply_pauli_rows(other, rows, 1, pauli)
    assert np.allclose(state, other, atol=0)
    # untouched rows stay bit-identical
    untouched = np.setdiff1d(np.arange(11), rows)
    assert np.array_equal(state[untouched], other[untouched])


def test_expect_z_parity():
    rng = np.random.default_rng(41)
    state = _random_state(rng, 13, 4)
    for qubit in range(4):
        a = kernels.expect_z(state, qubit)
        b = _kernels_py.expect_z(state, qubit)
        assert np.allclose(a, b, atol=1e-14)
        assert np.all(np.abs(a) <= 1 + 1e-12)


@pytest.mark.parametrize("pauli", [0, 1, 2])
def test_pauli_imag_inner_parity(pauli):
    rng = np.random.default_rng(53 + pauli)
    lam = _random_state(rng, 6, 3)
    phi = _random_state(rng, 6, 3)
    a = kernels.pauli_imag_inner(lam, phi, 1, pauli)
    b = _kernels_py.pauli_imag_inner(lam, phi, 1, pauli)
    assert np.allclose(a, b, atol=1e-14)


def test_norm_sq_parity():
    rng = np.random.default_rng(61)
    state = _random_state(rng, 4, 5)
    assert np.allclose(kernels.norm_sq(state), _kernels_py.norm_sq(state), atol=1e-14)
    assert np.allclose(kernels.norm_sq(state), 1.0, atol=1e-12)


def test_env_override_selects_python_backend():
    code = (
        "import os; os.environ['PQCFOURIER_BACKEND'] = 'python'; "
        "from pqcfourier.backend import backend_name; print(backend_name())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "python"


def test_active_backend_is_compiled_here():
    assert backend_name() == "compiled"


def test_python_backend_full_model_agreement(tmp_path):
    # whole-pipeline parity: values and gradients computed in a subprocess
    # forced onto the python backend match the compiled ones here
    code = f"""
import os; os.environ['PQCFOURIER_BACKEND'] = 'python'
import numpy as np
from pqcfourier import ModelConfig, build_circuit, model_output_batch, gradient_batch
circuit = build_circuit(ModelConfig('serial', ((1.0, 2.0), (1.5, 3.0)), ((0, 1),), 2))
rng = np.random.default_rng(77)
x = rng.uniform(-np.pi, np.pi, (5, 2))
theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
np.save({str(tmp_path / 'vals.npy')!r}, model_output_batch(circuit, x, theta))
np.save({str(tmp_path / 'grad.npy')!r}, gradient_batch(circuit, x, theta, weights=np.ones(5)))
"""
    subprocess.run([sys.executable, "-c", code], check=True)
    from pqcfourier import ModelConfig, build_circuit, gradient_batch, model_output_batch

    circuit = build_circuit(ModelConfig("serial", ((1.0, 2.0), (1.5, 3.0)), ((0, 1),), 2))
    rng = np.random.default_rng(77)
    x = rng.uniform(-np.pi, np.pi, (5, 2))
    theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
    vals = np.load(tmp_path / "vals.npy")
    grad = np.load(tmp_path / "grad.npy")
    assert np.allclose(model_output_batch(circuit, x, theta), vals, atol=1e-13)
    assert np.allclose(gradient_batch(circuit, x, theta, weights=np.ones(5)), grad, atol=1e-12)
