"""Shot sampling and error channels: statistics against closed forms."""

import numpy as np
import pytest

from pqcfourier import (
    ConfigurationError,
    ModelConfig,
    NoiseModel,
    ResourceLimitError,
    TrainConfig,
    build_circuit,
    minmax_scale,
    model_output_batch,
    noisy_evaluate,
    noisy_train,
    sample_expectation,
)
from pqcfourier.dataset import DataView

ONE_QUBIT = build_circuit(ModelConfig("parallel", ((1.0,),), ((0,),), 1))


def test_default_rates():
    noise = NoiseModel()
    assert noise.p_1q == 2.789e-4
    assert noise.p_2q == 2.656e-3
    assert noise.p_readout == 8.423e-3
    assert noise.shots == 4096


def test_validation_and_round_trip():
    noise = NoiseModel(p_1q=0.01, p_2q=0.02, p_readout=0.03, shots=128)
    assert NoiseModel.from_dict(noise.to_dict()) == noise
    with pytest.raises(ConfigurationError):
        NoiseModel(p_1q=-0.1)
    with pytest.raises(ConfigurationError):
        NoiseModel(p_readout=1.5)
    with pytest.raises(ConfigurationError):
        NoiseModel(shots=0)
    with pytest.raises(ConfigurationError):
        NoiseModel.from_dict({"p1": 0.1})


def test_readout_only_closed_form():
    # |0> measured under readout error p: <Z> = 1 - 2p, checked at 10^6 shots
    p = NoiseModel().p_readout
    noise = NoiseModel(p_1q=0.0, p_2q=0.0, shots=1_000_000)
    estimate = sample_expectation(ONE_QUBIT, [0.0], np.zeros(6), noise, seed=7)
    assert abs(estimate[0] - (1 - 2 * p)) < 0.002


def test_zero_noise_sampling_consistency():
    # with all rates at zero the sampled mean approaches the exact expectation
    rng = np.random.default_rng(0)
    xs = rng.uniform(-np.pi, np.pi, (8, 1))
    theta = rng.uniform(0, 2 * np.pi, 6)
    exact = model_output_batch(ONE_QUBIT, xs, theta)
    noise = NoiseModel.zero(shots=1 << 16)
    view = DataView(inputs=xs, targets=exact)
    predictions, _ = noisy_evaluate(ONE_QUBIT, view, theta, noise, seed=3)
    # standard error at 2^16 shots is at most 1/256 per point
    assert np.max(np.abs(predictions - exact)) < 6 / 256


def test_variance_scales_inversely_with_shots():
    # repeated estimates of a fixed point: var ~ 1/shots within a factor of 2
    theta = np.full(6, 0.3)
    x = [0.9]
    exact = float(model_output_batch(ONE_QUBIT, np.array([x]), theta)[0])
    per_shot_var = 1.0 - exact**2  # Bernoulli variance of a +-1 outcome
    for shots in (256, 1024, 4096):
        noise = NoiseModel.zero(shots=shots)
        reps = np.array([
            sample_expectation(ONE_QUBIT, x, theta, noise, seed=s)[0] for s in range(160)
        ])
        observed = reps.var()
        expected = per_shot_var / shots
        assert expected / 2 < observed < expected * 2


def test_depolarizing_contracts_expectations():
    # gate noise shrinks |<Z>| on average: noisy estimate stays below
    # noiseless + 5 standard errors
    rng = np.random.default_rng(5)
    config = ModelConfig("parallel", ((1.0, 2.0),), ((0,),), 2)
    circuit = build_circuit(config)
    theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
    xs = rng.uniform(-np.pi, np.pi, (12, 1))
    exact = model_output_batch(circuit, xs, theta)
    noise = NoiseModel(p_1q=0.02, p_2q=0.05, p_readout=0.0, shots=8192)
    view = DataView(inputs=xs, targets=exact)
    predictions, _ = noisy_evaluate(circuit, view, theta, noise, seed=11)
    se = 1.0 / np.sqrt(noise.shots)
    assert np.all(np.abs(predictions) <= np.abs(exact) + 5 * se)
    # and the contraction is real: mean magnitude strictly drops
    assert np.mean(np.abs(predictions)) < np.mean(np.abs(exact))


def test_sampling_is_deterministic_per_seed():
    noise = NoiseModel(shots=512)
    theta = np.linspace(0, 1, 6)
    a = sample_expectation(ONE_QUBIT, [0.5], theta, noise, seed=9)
    b = sample_expectation(ONE_QUBIT, [0.5], theta, noise, seed=9)
    c = sample_expectation(ONE_QUBIT, [0.5], theta, noise, seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_row_streams_give_prefix_stability():
    # stream = f(seed, row position), so a batch prefix reproduces exactly
    noise = NoiseModel(shots=256)
    theta = np.linspace(0, 2, 6)
    xs = np.array([[0.1], [0.7], [-0.4]])
    ys = np.cos(xs[:, 0])
    full, _ = noisy_evaluate(ONE_QUBIT, DataView(inputs=xs, targets=ys),
                             theta, noise, seed=21)
    head, _ = noisy_evaluate(ONE_QUBIT, DataView(inputs=xs[:2], targets=ys[:2]),
                             theta, noise, seed=21)
    assert np.array_equal(full[:2], head)


def test_per_group_estimates_shape():
    config = ModelConfig("parallel", ((1.0,), (2.0,)), ((0,), (1,)), 1)
    circuit = build_circuit(config)
    noise = NoiseModel(shots=64)
    estimates = sample_expectation(circuit, [0.2, -0.3], np.zeros(circuit.n_params), noise, seed=1)
    assert estimates.shape == (2,)
    assert np.all(np.abs(estimates) <= 1.0)


def test_seed_validation():
    noise = NoiseModel(shots=16)
    with pytest.raises(ConfigurationError):
        sample_expectation(ONE_QUBIT, [0.0], np.zeros(6), noise, seed=-1)


def test_noisy_train_parameter_guard():
    big = build_circuit(ModelConfig("parallel", ((10.0, 20.0), (10.0, 20.0)), ((0, 1),), 13))  # 312 > 300
    xs = np.linspace(-np.pi, np.pi, 20).reshape(-1, 1)
    ds = minmax_scale(np.hstack([xs, xs]), np.cos(xs[:, 0]))
    with pytest.raises(ResourceLimitError):
        noisy_train(big, ds, TrainConfig(iterations=1), NoiseModel(shots=4), seed=0)


def test_noisy_train_single_qubit_smoke():
    xs = np.linspace(-np.pi, np.pi, 24).reshape(-1, 1)
    ds = minmax_scale(xs, np.cos(xs[:, 0]))
    config = TrainConfig(learning_rate=0.05, iterations=8, seed=4)
    noise = NoiseModel(p_1q=0.0, p_2q=0.0, p_readout=0.0, shots=2048)
    report = noisy_train(ONE_QUBIT, ds, config, noise, seed=2)
    assert report.mode == "noisy-parameter-shift"
    assert report.loss_history.shape == (8,)
    assert report.final_loss < report.initial_loss
    assert report.extras["noise"]["shots"] == 2048
    # deterministic under identical seeds
    again = noisy_train(ONE_QUBIT, ds, config, noise, seed=2)
    assert np.array_equal(report.final_theta, again.final_theta)
