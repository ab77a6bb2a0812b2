"""Statevector simulator: closed forms, unitarity, analytic gradient oracle."""

import numpy as np
import pytest

from pqcfourier import (
    ContractViolationError,
    Gate,
    ModelConfig,
    apply_gate,
    build_circuit,
    expectation_z,
    gradient,
    gradient_batch,
    model_output,
    model_output_batch,
    run_circuit,
    zero_state,
)

ONE_QUBIT = build_circuit(ModelConfig("parallel", ((1.0,),), ((0,),), 1))


def test_rx_expectation_closed_form():
    # <Z> after RX(x)|0> = cos(x); theta = 0 makes the ansatz the identity
    rng = np.random.default_rng(11)
    xs = rng.uniform(-np.pi, np.pi, 100)
    theta = np.zeros(ONE_QUBIT.n_params)
    for x in xs:
        assert abs(model_output(ONE_QUBIT, x, theta) - np.cos(x)) < 1e-10


def test_rotation_closed_forms_single_gates():
    state = apply_gate(zero_state(1), Gate("rx", 0, angle=0.7))
    assert abs(expectation_z(state, 0) - np.cos(0.7)) < 1e-12
    state = apply_gate(zero_state(1), Gate("ry", 0, angle=-1.3))
    assert abs(expectation_z(state, 0) - np.cos(1.3)) < 1e-12
    state = apply_gate(zero_state(1), Gate("rz", 0, angle=2.1))
    assert abs(expectation_z(state, 0) - 1.0) < 1e-12


def test_cnot_truth_table():
    # prepare |10> (control qubit 1 set) and flip the target qubit 0
    state = zero_state(2)
    state = apply_gate(state, Gate("rx", 1, angle=np.pi))  # |0> -> -i|1>
    state = apply_gate(state, Gate("cnot", 0, control=1))
    probs = np.abs(state.amplitudes) ** 2
    assert np.argmax(probs) == 0b11
    assert abs(probs[0b11] - 1.0) < 1e-12


def test_norm_preserved_over_random_gates():
    rng = np.random.default_rng(5)
    state = zero_state(6)
    kinds = ("rx", "ry", "rz")
    for _ in range(1000):
        if rng.random() < 0.3:
            control, target = rng.choice(6, size=2, replace=False)
            gate = Gate("cnot", int(target), control=int(control))
        else:
            gate = Gate(
                str(rng.choice(kinds)), int(rng.integers(6)),
                angle=float(rng.uniform(-np.pi, np.pi)),
            )
        state = apply_gate(state, gate)
        assert abs(state.norm() - 1.0) < 1e-10


def test_run_circuit_norm_and_output_agreement():
    config = ModelConfig("serial", ((1.0, 2.0), (1.0, 2.0)), ((0, 1),), 2)
    circuit = build_circuit(config)
    rng = np.random.default_rng(3)
    theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
    x = rng.uniform(-np.pi, np.pi, 2)
    state = run_circuit(circuit, x, theta)
    assert abs(state.norm() - 1.0) < 1e-12
    batch = model_output_batch(circuit, x.reshape(1, -1), theta)
    assert abs(model_output(circuit, x, theta) - batch[0]) < 1e-14


def _central_difference(circuit, x_rows, theta, h=1e-4):
    grad = np.zeros((x_rows.shape[0], theta.size))
    for j in range(theta.size):
        shifted = theta.copy()
        shifted[j] += h
        plus = model_output_batch(circuit, x_rows, shifted)
        shifted[j] -= 2 * h
        minus = model_output_batch(circuit, x_rows, shifted)
        grad[:, j] = (plus - minus) / (2 * h)
    return grad


@pytest.mark.parametrize(
    "config",
    [
        ModelConfig("parallel", ((1.0, 2.0),), ((0,),), 3),
        ModelConfig("serial", ((1.5, 4.0),), ((0,),), 2),
        ModelConfig("parallel", ((2.0,), (3.0,)), ((0,), (1,)), 2, combine="mean"),
        ModelConfig("serial", ((1.0, 3.0), (2.0, 5.0)), ((0, 1),), 1, encoding_axis="ry"),
        ModelConfig("parallel", ((1.0, 2.0), (3.0,)), ((0, 1),), 2, encoding_axis="rz"),
    ],
)
def test_gradient_matches_finite_differences(config):
    circuit = build_circuit(config)
    rng = np.random.default_rng(circuit.n_params)
    x_rows = rng.uniform(-np.pi, np.pi, (4, circuit.n_features))
    theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
    analytic = gradient_batch(circuit, x_rows, theta)
    numeric = _central_difference(circuit, x_rows, theta)
    scale = np.maximum(np.abs(numeric), 1e-2)
    assert np.max(np.abs(analytic - numeric) / scale) < 1e-6


def test_gradient_weighted_sum_mode():
    circuit = build_circuit(ModelConfig("parallel", ((1.0, 2.0), (2.0,)), ((0, 1),), 2))
    rng = np.random.default_rng(8)
    x_rows = rng.uniform(-np.pi, np.pi, (6, 2))
    theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
    weights = rng.normal(size=6)
    combined = gradient_batch(circuit, x_rows, theta, weights=weights)
    per_row = gradient_batch(circuit, x_rows, theta)
    assert np.allclose(combined, weights @ per_row, atol=1e-12)


def test_single_point_gradient_matches_batch():
    circuit = build_circuit(ModelConfig("serial", ((2.0,),), ((0,),), 2))
    theta = np.linspace(0.1, 1.7, circuit.n_params)
    g1 = gradient(circuit, 0.4, theta)
    g2 = gradient_batch(circuit, np.array([[0.4]]), theta)[0]
    assert np.allclose(g1, g2, atol=1e-14)


def test_input_validation():
    theta = np.zeros(ONE_QUBIT.n_params)
    with pytest.raises(ContractViolationError):
        model_output_batch(ONE_QUBIT, np.zeros((3, 2)), theta)  # wrong feature count
    with pytest.raises(ContractViolationError):
        model_output_batch(ONE_QUBIT, np.zeros((3, 1)), np.zeros(5))  # wrong theta size
    with pytest.raises(ContractViolationError):
        model_output_batch(ONE_QUBIT, np.array([[np.nan]]), theta)


def test_gate_binding_validation():
    with pytest.raises(Exception):
        Gate("rx", 0)  # no binding
    with pytest.raises(Exception):
        Gate("rx", 0, angle=1.0, feature=0, prefactor=1.0)  # two bindings
    with pytest.raises(Exception):
        Gate("cnot", 0, control=0)  # control == target
    with pytest.raises(Exception):
        Gate("cnot", 0)  # missing control
