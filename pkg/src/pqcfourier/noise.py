"""Shot-based noisy execution via Monte-Carlo statevector trajectories.

Error model: a depolarizing event may fire after each gate (a composite
z-y-z rotation block counts as one single-qubit event, an encoding rotation
as one, a CNOT as one two-qubit event applying independent uniform
non-identity Paulis to control and target), and each measured bit flips
with the readout probability. Coherence (T1/T2) decay is not modeled: the
reported calibration has no gate durations to calibrate it against.

Determinism: every row of an evaluation owns one generator seeded by the
full key (seed, ..., row). All shots of a row are evolved as one batched
(shots, 2^n) statevector and share that stream; serial and row-parallel
execution therefore produce identical numbers. Draw order within a row is
fixed: per-event firing uniforms (in gate order), Pauli picks for firing
shots, the measurement uniform, then readout uniforms per measured qubit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import ConfigurationError, ContractViolationError, ResourceLimitError
from .simulator import _forward, _validate_inputs, expand_gates, rotation_matrix
from .training import AdamState, TrainConfig, TrainReport, adam_step, init_theta, r2

DEFAULT_P1 = 2.789e-4
DEFAULT_P2 = 2.656e-3
DEFAULT_READOUT = 8.423e-3
DEFAULT_SHOTS = 4096
MAX_SHIFT_PARAMS = 300


@dataclass(frozen=True)
class NoiseModel:
    p_1q: float = DEFAULT_P1
    p_2q: float = DEFAULT_P2
    p_readout: float = DEFAULT_READOUT
    shots: int = DEFAULT_SHOTS

    def __post_init__(self):
        for name in ("p_1q", "p_2q", "p_readout"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {p}")
        if self.shots < 1:
            raise ConfigurationError(f"shots must be >= 1, got {self.shots}")

    @property
    def gate_noiseless(self) -> bool:
        return self.p_1q == 0.0 and self.p_2q == 0.0

    @staticmethod
    def zero(shots: int = DEFAULT_SHOTS) -> "NoiseModel":
        return NoiseModel(0.0, 0.0, 0.0, shots)

    def to_dict(self) -> dict:
        return {
            "p_1q": self.p_1q,
            "p_2q": self.p_2q,
            "p_readout": self.p_readout,
            "shots": self.shots,
        }

    @staticmethod
    def from_dict(data: dict) -> "NoiseModel":
        unknown = set(data) - {"p_1q", "p_2q", "p_readout", "shots"}
        if unknown:
            raise ConfigurationError(f"unknown noise keys: {sorted(unknown)}")
        return NoiseModel(**data)


def _apply_pauli_mix(state, rows, qubit, rng) -> None:
    """Uniform non-identity Pauli on `qubit` for the given shot rows."""
    picks = rng.integers(0, 3, size=rows.size)
    for pauli in range(3):
        chosen = rows[picks == pauli]
        if chosen.size:
            kernels.apply_pauli_rows(state, chosen, qubit, pauli)


def _evolve_trajectories(prims, n_qubits, x, theta, noise, rng) -> np.ndarray:
    dim = 1 << n_qubits
    state = np.zeros((noise.shots, dim), dtype=np.complex128)
    state[:, 0] = 1.0
    n_events = sum(1 for p in prims if p.is_cnot or p.noise_1q)
    fire = rng.random((n_events, noise.shots)) if n_events else np.zeros((0, noise.shots))
    event = 0
    for p in prims:
        if p.is_cnot:
            kernels.apply_cnot(state, p.control, p.qubit)
            hits = np.nonzero(fire[event] < noise.p_2q)[0]
            event += 1
            if hits.size:
                _apply_pauli_mix(state, hits, p.control, rng)
                _apply_pauli_mix(state, hits, p.qubit, rng)
            continue
        if p.slot >= 0:
            angle = theta[p.slot]
        elif p.feature >= 0:
            angle = p.prefactor * x[p.feature]
        else:
            angle = p.angle
        kernels.apply_1q(state, p.qubit, rotation_matrix(p.axis, angle))
        if p.noise_1q:
            hits = np.nonzero(fire[event] < noise.p_1q)[0]
            event += 1
            if hits.size:
                _apply_pauli_mix(state, hits, p.qubit, rng)
    return state


def _measure_groups(probs_or_state, measurement_qubits, noise, rng, from_state: bool):
    if from_state:
        probs = np.abs(probs_or_state) ** 2      # (shots, dim)
        cum = np.cumsum(probs, axis=1)
        u = rng.random(noise.shots) * cum[:, -1]
        outcomes = np.sum(cum < u[:, None], axis=1)
    else:
        cum = np.cumsum(probs_or_state)          # (dim,) distribution, iid shots
        u = rng.random(noise.shots) * cum[-1]
        outcomes = np.searchsorted(cum, u, side="left")
    estimates = np.empty(len(measurement_qubits))
    for g, qubit in enumerate(measurement_qubits):
        bits = (outcomes >> qubit) & 1
        if noise.p_readout > 0.0:
            bits = bits ^ (rng.random(noise.shots) < noise.p_readout)
        estimates[g] = 1.0 - 2.0 * bits.mean()
    return estimates


def _sample_rows(circuit, x_rows, theta, noise: NoiseModel, key: tuple) -> np.ndarray:
    """Per-row, per-group empirical <Z>; rows get independent streams."""
    x_rows = np.ascontiguousarray(x_rows, dtype=float)
    theta = np.asarray(theta, dtype=float)
    _validate_inputs(circuit, x_rows, theta)
    prims = expand_gates(circuit.gates)
    n_rows = x_rows.shape[0]
    out = np.empty((n_rows, len(circuit.measurement_qubits)))
    if noise.gate_noiseless:
        psi = _forward(prims, circuit.n_qubits, x_rows, theta)
        probs = np.abs(psi) ** 2
        for i in range(n_rows):
            rng = np.random.default_rng(key + (i,))
            out[i] = _measure_groups(
                probs[i], circuit.measurement_qubits, noise, rng, from_state=False
            )
    else:
        for i in range(n_rows):
            rng = np.random.default_rng(key + (i,))
            state = _evolve_trajectories(prims, circuit.n_qubits, x_rows[i], theta, noise, rng)
            out[i] = _measure_groups(
                state, circuit.measurement_qubits, noise, rng, from_state=True
            )
    return out


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ConfigurationError(f"seed must be >= 0, got {seed}")
    return seed


def _combine(circuit, group_estimates: np.ndarray) -> np.ndarray:
    scale = 1.0 / len(circuit.groups) if circuit.combine == "mean" else 1.0
    return scale * group_estimates.sum(axis=1)


def sample_expectation(circuit, x, theta, noise: NoiseModel, seed: int) -> np.ndarray:
    """Empirical per-group <Z> for one feature row under the noise model."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _sample_rows(circuit, x[None, :], theta, noise, (_check_seed(seed),))[0]


def noisy_evaluate(circuit, view, theta, noise: NoiseModel, seed: int):
    """(predictions, r2) over a data view, one stream per row."""
    estimates = _sample_rows(circuit, view.inputs, theta, noise, (_check_seed(seed),))
    predictions = _combine(circuit, estimates)
    return predictions, r2(predictions, view.targets)


def noisy_train(
    circuit,
    dataset,
    train_config: TrainConfig,
    noise: NoiseModel,
    seed: int,
    max_params: int = MAX_SHIFT_PARAMS,
) -> TrainReport:
    """Adam on sampled expectations; gradients via the parameter-shift rule.

    Each iteration costs 1 + 2*n_params noisy evaluations of the train
    split, so parameter counts above `max_params` are rejected.
    """
    seed = _check_seed(seed)
    if circuit.n_params > max_params:
        raise ResourceLimitError(
            f"noisy training with {circuit.n_params} parameters exceeds the "
            f"{max_params}-parameter guard (2 evaluations per parameter per iteration)"
        )
    if circuit.n_features != dataset.n_dims:
        raise ContractViolationError(
            f"circuit has {circuit.n_features} features, dataset has {dataset.n_dims}"
        )
    ds = dataset if dataset.train_idx is not None else dataset.with_split(train_config.seed)
    train_view, test_view = ds.train, ds.test
    start = time.perf_counter()
    theta = init_theta(circuit.n_params, train_config)
    state = AdamState.zeros(circuit.n_params)
    n_rows = train_view.n_rows
    loss_history = np.empty(train_config.iterations)

    def evaluate(rows, th, key):
        return _combine(circuit, _sample_rows(circuit, rows, th, noise, key))

    for it in range(train_config.iterations):
        pred = evaluate(train_view.inputs, theta, (seed, it, 0))
        resid = pred - train_view.targets
        loss_history[it] = np.mean(resid * resid)
        grad = np.empty(circuit.n_params)
        for j in range(circuit.n_params):
            shifted = theta.copy()
            shifted[j] += 0.5 * np.pi
            plus = evaluate(train_view.inputs, shifted, (seed, it, 2 * j + 1))
            shifted[j] -= np.pi
            minus = evaluate(train_view.inputs, shifted, (seed, it, 2 * j + 2))
            grad[j] = (2.0 / n_rows) * (resid @ (0.5 * (plus - minus)))
        state, theta = adam_step(state, theta, grad, train_config)

    r2_train = r2(evaluate(train_view.inputs, theta, (seed, train_config.iterations, 0)),
                  train_view.targets)
    r2_test = r2(evaluate(test_view.inputs, theta, (seed, train_config.iterations, 1)),
                 test_view.targets)
    return TrainReport(
        loss_history=loss_history,
        final_theta=theta,
        r2_train=r2_train,
        r2_test=r2_test,
        wall_time=time.perf_counter() - start,
        seed=train_config.seed,
        mode="noisy-parameter-shift",
        extras={"noise": NoiseModel.to_dict(noise), "noise_seed": seed},
    )
