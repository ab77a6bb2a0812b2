"""Full-batch Adam training of circuit models, plus MSE/R2 metrics.

Runs are deterministic: parameter initialization draws from one seeded
generator, gradients come from the exact engines in fastpath, and the
loss history is reproducible bitwise for a fixed (config, seed). multi_run
executes run k with seed base+k for both the train/test split and the
initialization, mirroring seeded benchmark sweeps.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .circuit import ModelConfig, ParamCircuit, build_circuit
from .dataset import Dataset
from .errors import (
    ConfigurationError,
    ContractViolationError,
    DegenerateDataError,
    NumericFailureError,
)
from .fastpath import ModelEngine

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    iterations: int = 5000
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    init_low: float = 0.0
    init_high: float = TWO_PI
    seed: int = 42
    record_test_loss: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigurationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.iterations < 1:
            raise ConfigurationError(f"iterations must be >= 1, got {self.iterations}")
        if not self.init_low < self.init_high:
            raise ConfigurationError(
                f"init range [{self.init_low}, {self.init_high}) is empty"
            )
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigurationError("beta1/beta2 must lie in [0, 1)")
        if self.epsilon <= 0:
            raise ConfigurationError("epsilon must be positive")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {self.seed}")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "iterations": self.iterations,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
            "init_low": self.init_low,
            "init_high": self.init_high,
            "seed": self.seed,
            "record_test_loss": self.record_test_loss,
        }

    @staticmethod
    def from_dict(data: dict) -> "TrainConfig":
        known = set(TrainConfig().to_dict())
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown training keys: {sorted(unknown)}")
        return TrainConfig(**data)


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @staticmethod
    def zeros(n: int) -> "AdamState":
        return AdamState(np.zeros(n), np.zeros(n), 0)


def adam_step(state: AdamState, theta: np.ndarray, grad: np.ndarray, config: TrainConfig):
    """One bias-corrected Adam update; pure, returns (new_state, new_theta)."""
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if theta.shape != grad.shape or theta.shape != state.m.shape:
        raise ContractViolationError(
            f"shape mismatch: theta {theta.shape}, grad {grad.shape}, state {state.m.shape}"
        )
    if not np.all(np.isfinite(grad)):
        raise NumericFailureError(f"non-finite gradient at optimizer step {state.t + 1}")
    t = state.t + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * grad
    v = config.beta2 * state.v + (1.0 - config.beta2) * grad * grad
    m_hat = m / (1.0 - config.beta1**t)
    v_hat = v / (1.0 - config.beta2**t)
    new_theta = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return AdamState(m, v, t), new_theta


def mse(pred, actual) -> float:
    pred = np.asarray(pred, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if pred.shape != actual.shape or pred.size == 0:
        raise ContractViolationError(
            f"mse needs equal nonzero lengths, got {pred.shape} and {actual.shape}"
        )
    diff = pred - actual
    return float(np.mean(diff * diff))


def r2(pred, actual) -> float:
    """1 - SS_res/SS_tot about the mean of actual."""
    pred = np.asarray(pred, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if pred.shape != actual.shape or pred.size == 0:
        raise ContractViolationError(
            f"r2 needs equal nonzero lengths, got {pred.shape} and {actual.shape}"
        )
    centered = actual - actual.mean()
    ss_tot = float(centered @ centered)
    if ss_tot == 0.0:
        raise DegenerateDataError("r2 is undefined for zero-variance targets")
    resid = actual - pred
    return 1.0 - float(resid @ resid) / ss_tot


def init_theta(n_params: int, config: TrainConfig) -> np.ndarray:
    rng = np.random.default_rng(config.seed)
    return rng.uniform(config.init_low, config.init_high, n_params)


@dataclass
class TrainReport:
    loss_history: np.ndarray
    final_theta: np.ndarray
    r2_train: float
    r2_test: float
    wall_time: float
    seed: int
    mode: str = "noiseless"
    test_loss_history: Optional[np.ndarray] = None
    extras: dict = field(default_factory=dict)

    @property
    def final_loss(self) -> float:
        return float(self.loss_history[-1])

    @property
    def initial_loss(self) -> float:
        return float(self.loss_history[0])

    def to_dict(self) -> dict:
        """Deterministic results subtree plus a non-reproducible meta subtree."""
        results = {
            "seed": self.seed,
            "mode": self.mode,
            "iterations": int(self.loss_history.size),
            "initial_loss": self.initial_loss,
            "final_loss": self.final_loss,
            "r2_train": self.r2_train,
            "r2_test": self.r2_test,
        }
        results.update(self.extras)
        return {"results": results, "meta": {"wall_time_s": self.wall_time}}

    def save_loss_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["iteration", "train_mse"]
            if self.test_loss_history is not None:
                header.append("test_mse")
            writer.writerow(header)
            for i, value in enumerate(self.loss_history):
                row = [i, repr(float(value))]
                if self.test_loss_history is not None:
                    row.append(repr(float(self.test_loss_history[i])))
                writer.writerow(row)


def _split_views(dataset: Dataset, seed: int):
    ds = dataset if dataset.train_idx is not None else dataset.with_split(seed)
    return ds.train, ds.test


def train(
    circuit: ParamCircuit,
    dataset: Dataset,
    config: TrainConfig,
    force_reference: bool = False,
) -> TrainReport:
    """Full-batch Adam on the train split; R2 on both splits at the end."""
    if circuit.n_features != dataset.n_dims:
        raise ContractViolationError(
            f"circuit has {circuit.n_features} features, dataset has {dataset.n_dims}"
        )
    train_view, test_view = _split_views(dataset, config.seed)
    start = time.perf_counter()
    engine = ModelEngine(circuit, train_view.inputs, force_reference=force_reference)
    test_engine = ModelEngine(circuit, test_view.inputs, force_reference=force_reference)
    theta = init_theta(circuit.n_params, config)
    state = AdamState.zeros(circuit.n_params)
    n_rows = train_view.n_rows
    loss_history = np.empty(config.iterations)
    test_history = np.empty(config.iterations) if config.record_test_loss else None

    for it in range(config.iterations):
        pred = engine.forward(theta)
        resid = pred - train_view.targets
        loss_history[it] = np.mean(resid * resid)
        if test_history is not None:
            test_history[it] = mse(test_engine.forward(theta), test_view.targets)
        grad = engine.backward((2.0 / n_rows) * resid)
        try:
            state, theta = adam_step(state, theta, grad, config)
        except NumericFailureError as exc:
            raise NumericFailureError(f"training iteration {it}: {exc}") from exc

    r2_train = r2(engine.forward(theta), train_view.targets)
    r2_test = r2(test_engine.forward(theta), test_view.targets)
    return TrainReport(
        loss_history=loss_history,
        final_theta=theta,
        r2_train=r2_train,
        r2_test=r2_test,
        wall_time=time.perf_counter() - start,
        seed=config.seed,
        test_loss_history=test_history,
    )


def multi_run(
    circuit_config: ModelConfig,
    dataset: Dataset,
    config: TrainConfig,
    n_runs: int,
    force_reference: bool = False,
) -> list:
    """Run k trains with seed = base + k applied to both split and init."""
    if n_runs < 1:
        raise ConfigurationError(f"n_runs must be >= 1, got {n_runs}")
    circuit = build_circuit(circuit_config)
    reports = []
    for k in range(n_runs):
        run_config = replace(config, seed=config.seed + k)
        run_dataset = dataset.with_split(run_config.seed)
        reports.append(train(circuit, run_dataset, run_config, force_reference=force_reference))
    return reports
