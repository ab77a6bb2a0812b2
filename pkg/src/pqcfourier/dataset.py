"""White-box Fourier-series targets, grid sampling, scaling, splitting.

A TargetSpec is a real truncated Fourier series: constant c0 plus terms
(omega, c) each contributing 2*Re[c * exp(i omega.x)]. Datasets sample a
target on an endpoint-inclusive Cartesian grid, MinMax-scale inputs to
[-pi, pi] per dimension and outputs to [-1, 1] (computed on the full data
before splitting), and carry a seeded shuffled 80/20 train/test split.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    ContractViolationError,
    DegenerateDataError,
    ResourceLimitError,
)

DEFAULT_ROW_CAP = 1_000_000
TEST_FRACTION = 0.2


# ---------------------------------------------------------------------------
# Target functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TargetSpec:
    """Truncated real Fourier series: c0 + sum over terms of 2*Re[c*e^(i w.x)]."""

    d: int
    c0: float
    terms: tuple  # ((omega_1..omega_d), complex coefficient) pairs

    def __post_init__(self):
        terms = tuple((tuple(float(w) for w in omega), complex(c)) for omega, c in self.terms)
        object.__setattr__(self, "terms", terms)
        if self.d < 1:
            raise ConfigurationError(f"dimension must be >= 1, got {self.d}")
        for omega, _ in terms:
            if len(omega) != self.d:
                raise ConfigurationError(f"frequency vector {omega} is not {self.d}-dimensional")

    def frequency_vectors(self) -> np.ndarray:
        return np.array([omega for omega, _ in self.terms])

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "c0": self.c0,
            "terms": [
                {"omega": list(omega), "re": c.real, "im": c.imag} for omega, c in self.terms
            ],
        }

    @staticmethod
    def from_dict(data: dict) -> "TargetSpec":
        unknown = set(data) - {"d", "c0", "terms"}
        if unknown:
            raise ConfigurationError(f"unknown target keys: {sorted(unknown)}")
        terms = []
        for t in data.get("terms", []):
            bad = set(t) - {"omega", "re", "im"}
            if bad:
                raise ConfigurationError(f"unknown target term keys: {sorted(bad)}")
            terms.append((tuple(t["omega"]), complex(t.get("re", 0.0), t.get("im", 0.0))))
        return TargetSpec(d=int(data["d"]), c0=float(data.get("c0", 0.0)), terms=tuple(terms))


def target_2d() -> TargetSpec:
    """2-feature target with all 9 frequency combinations over {10, 20, 30}."""
    omegas = (10, 20, 30)
    terms = []
    for k, w1 in enumerate(omegas):
        for l, w2 in enumerate(omegas):
            value = 0.05 * (3 * k + l + 1)
            terms.append(((w1, w2), complex(value, value)))
    return TargetSpec(d=2, c0=0.5, terms=tuple(terms))


def target_4d() -> TargetSpec:
    """4-feature target whose frequencies mix only inside the pairs (x1,x2) and (x3,x4)."""
    return TargetSpec(
        d=4,
        c0=0.1,
        terms=(
            ((20, 30, 0, 0), 0.15 + 0.17j),
            ((10, 40, 0, 0), 0.21 + 0.23j),
            ((0, 0, 10, 20), 0.27 + 0.34j),
            ((0, 0, 30, 40), 0.03 + 0.71j),
        ),
    )


TARGET_PRESETS = {"t2d": target_2d, "t4d": target_4d}


def eval_target_batch(spec: TargetSpec, x_rows: np.ndarray) -> np.ndarray:
    """Evaluate the series on (n_rows, d) inputs."""
    x_rows = np.asarray(x_rows, dtype=float)
    if x_rows.ndim != 2 or x_rows.shape[1] != spec.d:
        raise ContractViolationError(
            f"input rows of shape {x_rows.shape} do not match d={spec.d}"
        )
    out = np.full(x_rows.shape[0], float(spec.c0))
    if spec.terms:
        omegas = np.array([omega for omega, _ in spec.terms], dtype=float)
        coeffs = np.array([c for _, c in spec.terms])
        phases = x_rows @ omegas.T
        out += 2.0 * (np.cos(phases) @ coeffs.real - np.sin(phases) @ coeffs.imag)
    return out


def eval_target(spec: TargetSpec, x) -> float:
    """Evaluate the series at one input vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(eval_target_batch(spec, x.reshape(1, -1))[0])


# ---------------------------------------------------------------------------
# Grids, scaling, splits
# ---------------------------------------------------------------------------

def cartesian_grid(points_per_dim: int, d: int, row_cap: int = DEFAULT_ROW_CAP) -> np.ndarray:
    """Lexicographic n^d grid over [-pi, pi]^d, endpoints included."""
    if points_per_dim < 2:
        raise ConfigurationError(f"points_per_dim must be >= 2, got {points_per_dim}")
    if d < 1:
        raise ConfigurationError(f"d must be >= 1, got {d}")
    n_rows = points_per_dim**d
    if n_rows > row_cap:
        raise ResourceLimitError(
            f"grid of {points_per_dim}^{d} = {n_rows} rows exceeds the cap of {row_cap}"
        )
    axis = np.linspace(-np.pi, np.pi, points_per_dim)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


@dataclass(frozen=True)
class DataView:
    """A (inputs, targets) slice of a dataset."""

    inputs: np.ndarray
    targets: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class Dataset:
    """Scaled inputs/targets with the scaling record and optional split indices."""

    inputs: np.ndarray       # (N, d) in [-pi, pi]
    targets: np.ndarray      # (N,) in [-1, 1]
    input_min: np.ndarray    # raw per-dimension minima
    input_max: np.ndarray
    target_min: float
    target_max: float
    train_idx: Optional[np.ndarray] = None
    test_idx: Optional[np.ndarray] = None

    @property
    def n_rows(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_dims(self) -> int:
        return self.inputs.shape[1]

    @property
    def has_split(self) -> bool:
        return self.train_idx is not None

    @property
    def train(self) -> DataView:
        if not self.has_split:
            raise ContractViolationError("dataset has no split; call split() first")
        return DataView(self.inputs[self.train_idx], self.targets[self.train_idx])

    @property
    def test(self) -> DataView:
        if not self.has_split:
            raise ContractViolationError("dataset has no split; call split() first")
        return DataView(self.inputs[self.test_idx], self.targets[self.test_idx])

    def with_split(self, seed: int) -> "Dataset":
        train_idx, test_idx = _split_indices(self.n_rows, seed)
        return replace(self, train_idx=train_idx, test_idx=test_idx)


def minmax_scale(raw_inputs: np.ndarray, raw_targets: np.ndarray) -> Dataset:
    """Affine-map inputs to [-pi, pi] per dimension and targets to [-1, 1]."""
    raw_inputs = np.asarray(raw_inputs, dtype=float)
    raw_targets = np.asarray(raw_targets, dtype=float)
    if raw_inputs.ndim != 2 or raw_targets.shape != (raw_inputs.shape[0],):
        raise ContractViolationError(
            f"inputs {raw_inputs.shape} and targets {raw_targets.shape} do not align"
        )
    in_min = raw_inputs.min(axis=0)
    in_max = raw_inputs.max(axis=0)
    t_min = float(raw_targets.min())
    t_max = float(raw_targets.max())
    if np.any(in_max - in_min <= 0):
        raise DegenerateDataError("constant input dimension cannot be scaled")
    if t_max - t_min <= 0:
        raise DegenerateDataError("constant targets cannot be scaled")
    inputs = -np.pi + (2 * np.pi) * (raw_inputs - in_min) / (in_max - in_min)
    targets = -1.0 + 2.0 * (raw_targets - t_min) / (t_max - t_min)
    return Dataset(
        inputs=inputs,
        targets=targets,
        input_min=in_min,
        input_max=in_max,
        target_min=t_min,
        target_max=t_max,
    )


def unscale_predictions(dataset: Dataset, predictions: np.ndarray) -> np.ndarray:
    """Map predictions from the scaled [-1, 1] range back to raw target units."""
    predictions = np.asarray(predictions, dtype=float)
    return dataset.target_min + (predictions + 1.0) * (dataset.target_max - dataset.target_min) / 2.0


def output_scaling(dataset: Dataset) -> tuple:
    """(a, b) of the forward target map y_scaled = a*y_raw + b."""
    a = 2.0 / (dataset.target_max - dataset.target_min)
    return a, -1.0 - a * dataset.target_min


def _split_indices(n_rows: int, seed: int):
    if n_rows < 5:
        raise ConfigurationError(f"need at least 5 rows to split, got {n_rows}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_rows)
    n_test = max(1, int(TEST_FRACTION * n_rows))
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def split(dataset: Dataset, seed: int):
    """Seeded shuffled 80/20 split; returns (train_view, test_view)."""
    ds = dataset.with_split(seed)
    return ds.train, ds.test


def grid_dataset(spec: TargetSpec, points_per_dim: int, row_cap: int = DEFAULT_ROW_CAP) -> Dataset:
    """Sample a target on its grid and scale: the standard experiment dataset."""
    inputs = cartesian_grid(points_per_dim, spec.d, row_cap)
    return minmax_scale(inputs, eval_target_batch(spec, inputs))


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

def save_csv(dataset: Dataset, path) -> None:
    """Write scaled rows as x1..xd,y."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(dataset.n_dims)] + ["y"])
        for row, y in zip(dataset.inputs, dataset.targets):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(y))])


def load_csv(path) -> tuple:
    """Read (inputs, targets) arrays from an x1..xd,y file."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 2 or header[-1] != "y":
            raise ConfigurationError(f"unexpected dataset header {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.asarray(rows, dtype=float)
    return data[:, :-1], data[:, -1]
