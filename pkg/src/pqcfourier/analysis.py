"""Fourier-coefficient extraction, coefficient diffs, classical baselines.

Coefficients follow the convention f(x) = sum_w c_w exp(i w.x) with integer
frequency vectors w. The extraction grid is uniform over [-pi, pi) with the
right endpoint excluded (period-aligned), independent of the endpoint-
inclusive training grid: functions are re-evaluated on the DFT's own grid.

Sub-Nyquist grids are rejected unless the caller declares the function's
known frequency support; the request is then served only when no two
support vectors collide modulo the grid size, which keeps every reported
bin alias-free.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ConfigurationError, ContractViolationError, DegenerateDataError
from .dataset import Dataset, TargetSpec
from .training import r2

DEFAULT_GRID = 128
HERMITIAN_TOL = 1e-9


def _as_int_vectors(freq_set, dim=None) -> np.ndarray:
    vecs = [np.atleast_1d(np.asarray(v)) for v in freq_set]
    if not vecs:
        raise ContractViolationError("empty frequency set")
    arr = np.stack(vecs).astype(float)
    rounded = np.rint(arr)
    if np.max(np.abs(arr - rounded)) > 1e-9:
        raise ConfigurationError("integer frequency vectors required")
    arr = rounded.astype(int)
    if dim is not None and arr.shape[1] != dim:
        raise ContractViolationError(
            f"frequency vectors are {arr.shape[1]}-dimensional, expected {dim}"
        )
    return arr


@dataclass(frozen=True)
class CoefficientTable:
    """Integer frequency vectors mapped to complex coefficients."""

    frequencies: tuple      # of int tuples
    coefficients: np.ndarray
    n_grid: int             # 0 marks an analytic (grid-free) table

    def __post_init__(self):
        if len(self.frequencies) != len(self.coefficients):
            raise ContractViolationError("frequencies and coefficients differ in length")
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.frequencies)})

    @property
    def dim(self) -> int:
        return len(self.frequencies[0])

    def __len__(self) -> int:
        return len(self.frequencies)

    def __contains__(self, omega) -> bool:
        return tuple(int(w) for w in np.atleast_1d(omega)) in self._index

    def get(self, omega) -> complex:
        key = tuple(int(w) for w in np.atleast_1d(omega))
        return complex(self.coefficients[self._index[key]])

    def items(self):
        return zip(self.frequencies, self.coefficients)

    def hermitian_violation(self) -> float:
        """Max |c(-w) - conj(c(w))| over vectors whose negation is present."""
        worst = 0.0
        for w, c in self.items():
            neg = tuple(-v for v in w)
            if neg in self._index:
                worst = max(worst, abs(self.coefficients[self._index[neg]] - np.conj(c)))
        return worst

    def to_csv(self, path) -> None:
        d = self.dim
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"omega_{i + 1}" for i in range(d)] + ["re", "im"])
            order = sorted(range(len(self.frequencies)), key=lambda i: self.frequencies[i])
            for i in order:
                c = self.coefficients[i]
                writer.writerow(list(self.frequencies[i]) + [repr(float(c.real)), repr(float(c.imag))])


def _dft_axis(n_grid: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(n_grid) / n_grid


def dft_grid(n_grid: int, d: int) -> np.ndarray:
    axis = _dft_axis(n_grid)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _check_aliasing(freqs: np.ndarray, n_grid: int, known_support) -> None:
    over = np.abs(freqs).max(axis=1) * 2 >= n_grid
    if not over.any() and known_support is None:
        return
    if known_support is None:
        bad = freqs[int(np.argmax(over))]
        raise ConfigurationError(
            f"n_grid={n_grid} cannot resolve frequency {tuple(bad)} "
            f"(need n_grid > {2 * int(np.abs(bad).max())}); pass known_support "
            "to permit a sub-Nyquist grid"
        )
    support = _as_int_vectors(known_support, freqs.shape[1])
    residues = {}
    for vec in support:
        residues.setdefault(tuple(vec % n_grid), []).append(tuple(vec))
    for res, members in residues.items():
        if len(members) > 1:
            raise ConfigurationError(
                f"support vectors {members} collide modulo n_grid={n_grid}"
            )
    for vec in freqs:
        members = residues.get(tuple(vec % n_grid), [])
        if members and members != [tuple(vec)]:
            raise ConfigurationError(
                f"bin of {tuple(vec)} is aliased by support vector {members[0]} "
                f"at n_grid={n_grid}"
            )


def dft_coefficients(f, freq_set, n_grid: int = DEFAULT_GRID, known_support=None) -> CoefficientTable:
    """c_w = mean over the [-pi, pi) grid of f(x) exp(-i w.x)."""
    freqs = _as_int_vectors(freq_set)
    d = freqs.shape[1]
    if n_grid < 2:
        raise ConfigurationError(f"n_grid must be >= 2, got {n_grid}")
    _check_aliasing(freqs, n_grid, known_support)
    values = np.asarray(f(dft_grid(n_grid, d)), dtype=float)
    if values.shape != (n_grid**d,):
        raise ContractViolationError(
            f"evaluable returned shape {values.shape}, expected ({n_grid**d},)"
        )
    grid_values = values.reshape((n_grid,) * d)
    coefs = np.empty(len(freqs), dtype=np.complex128)
    if d <= 2:
        spectrum = np.fft.fftn(grid_values) / n_grid**d
        signs = (-1.0) ** np.abs(freqs).sum(axis=1)
        for i, vec in enumerate(freqs):
            coefs[i] = signs[i] * spectrum[tuple(vec % n_grid)]
    else:
        axis = _dft_axis(n_grid)
        for i, vec in enumerate(freqs):
            phases = [np.exp(-1j * w * axis) for w in vec]
            coefs[i] = reduce(lambda acc, p: np.tensordot(p, acc, axes=(0, 0)),
                              phases, grid_values.astype(np.complex128)) / n_grid**d
    return CoefficientTable(tuple(map(tuple, freqs)), coefs, n_grid)


def model_coefficients(circuit, theta, n_grid: int = DEFAULT_GRID, freq_set=None,
                       known_support=None) -> CoefficientTable:
    """Extract a circuit model's coefficients on the DFT grid.

    Defaults to the circuit's declared spectrum as the frequency set.
    """
    from .fastpath import ModelEngine

    if freq_set is None:
        freq_set = circuit.spectrum.all_vectors()
    freqs = _as_int_vectors(freq_set, circuit.n_features)
    engine_cache = {}

    def f(rows):
        key = rows.shape
        if key not in engine_cache:
            engine_cache[key] = ModelEngine(circuit, rows)
        return engine_cache[key].forward(np.asarray(theta, dtype=float))

    return dft_coefficients(f, freqs, n_grid, known_support)


def target_coefficients(spec: TargetSpec, freq_set=None, output_scaling=None) -> CoefficientTable:
    """Analytic coefficient table of a target, optionally affine-rescaled.

    output_scaling (a, b) describes y' = a*y + b: every coefficient picks up
    the factor a and the DC bin additionally gains b.
    """
    a, b = (1.0, 0.0) if output_scaling is None else output_scaling
    table = {(0,) * spec.d: complex(a * spec.c0 + b)}
    for omega, c in spec.terms:
        vec = tuple(int(round(w)) for w in omega)
        neg = tuple(-w for w in vec)
        table[vec] = table.get(vec, 0.0) + a * c
        table[neg] = table.get(neg, 0.0) + a * np.conj(c)
    if freq_set is None:
        freqs = sorted(table)
    else:
        freqs = [tuple(v) for v in _as_int_vectors(freq_set, spec.d)]
    coefs = np.array([table.get(w, 0.0) for w in freqs], dtype=np.complex128)
    return CoefficientTable(tuple(freqs), coefs, 0)


@dataclass(frozen=True)
class CoefficientDiff:
    frequencies: tuple
    diffs: np.ndarray
    max_abs: float
    max_abs_frequency: tuple

    def __post_init__(self):
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.frequencies)})

    def get(self, omega) -> complex:
        key = tuple(int(w) for w in np.atleast_1d(omega))
        return complex(self.diffs[self._index[key]])


def coefficient_diff(model_table: CoefficientTable, target_table: CoefficientTable) -> CoefficientDiff:
    """Per-frequency model minus target, plus the largest-magnitude entry."""
    if set(model_table.frequencies) != set(target_table.frequencies):
        raise ContractViolationError("coefficient tables index different frequency sets")
    diffs = np.array(
        [model_table.get(w) - target_table.get(w) for w in model_table.frequencies],
        dtype=np.complex128,
    )
    worst = int(np.argmax(np.abs(diffs)))
    return CoefficientDiff(
        frequencies=model_table.frequencies,
        diffs=diffs,
        max_abs=float(np.abs(diffs[worst])),
        max_abs_frequency=model_table.frequencies[worst],
    )


@dataclass(frozen=True)
class FourierFit:
    frequencies: tuple
    intercept: float
    cos_coefficients: np.ndarray
    sin_coefficients: np.ndarray
    r2_train: float
    r2_test: float

    def predict(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        if not self.frequencies:
            return np.full(rows.shape[0], self.intercept)
        phases = rows @ np.asarray(self.frequencies, dtype=float).T
        return (
            self.intercept
            + np.cos(phases) @ self.cos_coefficients
            + np.sin(phases) @ self.sin_coefficients
        )

    def to_dict(self) -> dict:
        return {
            "frequencies": [list(w) for w in self.frequencies],
            "intercept": self.intercept,
            "cos": list(self.cos_coefficients),
            "sin": list(self.sin_coefficients),
            "r2_train": self.r2_train,
            "r2_test": self.r2_test,
        }


def fourier_least_squares(dataset: Dataset, freq_set) -> FourierFit:
    """Least squares on the basis [1, cos(w.x), sin(w.x) for w in freq_set]."""
    freq_list = list(freq_set)
    ds = dataset if dataset.train_idx is not None else dataset.with_split(42)
    train_view, test_view = ds.train, ds.test
    m = len(freq_list)
    if train_view.n_rows < 2 * m + 1:
        raise ContractViolationError(
            f"need at least {2 * m + 1} rows for {m} frequencies, have {train_view.n_rows}"
        )

    if m:
        freqs = _as_int_vectors(freq_list, dataset.n_dims)
        w_mat = freqs.astype(float).T
    else:
        freqs = np.zeros((0, dataset.n_dims), dtype=int)
        w_mat = np.zeros((dataset.n_dims, 0))

    def design(rows):
        phases = rows @ w_mat
        return np.concatenate(
            [np.ones((rows.shape[0], 1)), np.cos(phases), np.sin(phases)], axis=1
        )

    d_train = design(train_view.inputs)
    coef, _, rank, _ = np.linalg.lstsq(d_train, train_view.targets, rcond=None)
    if rank < d_train.shape[1]:
        raise DegenerateDataError(
            f"rank-deficient design matrix (rank {rank} of {d_train.shape[1]} columns)"
        )
    fit = FourierFit(
        frequencies=tuple(map(tuple, freqs)),
        intercept=float(coef[0]),
        cos_coefficients=coef[1 : 1 + m],
        sin_coefficients=coef[1 + m :],
        r2_train=r2(d_train @ coef, train_view.targets),
        r2_test=r2(design(test_view.inputs) @ coef, test_view.targets),
    )
    return fit


@dataclass(frozen=True)
class RunSummary:
    mean: float
    median: float
    q25: float
    q75: float
    min: float
    max: float
    n_runs: int

    @property
    def iqr(self) -> float:
        return self.q75 - self.q25

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "median": self.median,
            "q25": self.q25,
            "q75": self.q75,
            "min": self.min,
            "max": self.max,
            "n_runs": self.n_runs,
        }


def summarize_runs(scores) -> RunSummary:
    """Order statistics with linear-interpolation percentiles."""
    arr = np.asarray(list(scores), dtype=float)
    if arr.size == 0:
        raise ContractViolationError("cannot summarize an empty score list")
    q25, median, q75 = np.percentile(arr, [25, 50, 75])
    return RunSummary(
        mean=float(arr.mean()),
        median=float(median),
        q25=float(q25),
        q75=float(q75),
        min=float(arr.min()),
        max=float(arr.max()),
        n_runs=int(arr.size),
    )
