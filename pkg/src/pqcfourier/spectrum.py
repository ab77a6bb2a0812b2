"""Frequency-spectrum algebra for angle-encoded circuits.

A feature encoded r times with prefactors p_1..p_r contributes the generator
eigenvalue ladder {½ Σ ±p_i}; the model's accessible frequencies along that
feature are all pairwise differences of the ladder, i.e. every sum
Σ c_i·p_i with c_i in {-1, 0, +1}. Multi-feature spectra are Cartesian
products of the per-feature sets inside each mixed-frequency group; groups
are entanglement-isolated, so cross-group frequency vectors never occur.

Frequencies are kept as exact integers whenever every prefactor is an
integer; otherwise floats with a 1e-9 deduplication tolerance are used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, ContractViolationError, ResourceLimitError

_MAX_ENCODINGS = 12          # 3^12 candidate sums; enumeration guard
_MAX_VECTORS = 1_000_000     # refuse to materialize larger vector sets
_FLOAT_TOL = 1e-9


def _check_prefactors(prefactors: Sequence[float]) -> list[float]:
    prefactors = list(prefactors)
    if len(prefactors) == 0:
        raise ConfigurationError("prefactor list must be non-empty")
    if any(not np.isfinite(p) or p <= 0 for p in prefactors):
        raise ConfigurationError(f"prefactors must be positive and finite, got {prefactors}")
    if len(prefactors) > _MAX_ENCODINGS:
        raise ResourceLimitError(
            f"{len(prefactors)} encodings exceed the spectrum enumeration cap of {_MAX_ENCODINGS}"
        )
    return prefactors


def _is_integral(prefactors: Iterable[float]) -> bool:
    return all(float(p).is_integer() for p in prefactors)


@dataclass(frozen=True)
class Spectrum1D:
    """Sorted, symmetric set of frequencies reachable along one feature."""

    frequencies: tuple
    is_integral: bool = True

    def __post_init__(self):
        freqs = self.frequencies
        if list(freqs) != sorted(freqs):
            raise ConfigurationError("frequencies must be sorted")

    def __len__(self) -> int:
        return len(self.frequencies)

    def __iter__(self):
        return iter(self.frequencies)

    def __contains__(self, value) -> bool:
        arr = np.asarray(self.frequencies, dtype=float)
        idx = np.searchsorted(arr, float(value))
        for j in (idx - 1, idx, idx + 1):
            if 0 <= j < len(arr) and abs(arr[j] - float(value)) <= _FLOAT_TOL:
                return True
        return False

    @property
    def max_frequency(self) -> float:
        return max(abs(self.frequencies[0]), abs(self.frequencies[-1]))


def eigenvalue_ladder(prefactors: Sequence[float]) -> np.ndarray:
    """Eigenvalues ½·Σ ±p_i of the summed encoding generator, in basis order.

    The first prefactor maps to the most significant bit of the basis index,
    with bit 0 giving +p and bit 1 giving -p. [10, 20] -> [15, -5, 5, -15].
    """
    prefactors = _check_prefactors(prefactors)
    r = len(prefactors)
    basis = np.arange(1 << r)
    signs = 1.0 - 2.0 * ((basis[:, None] >> np.arange(r - 1, -1, -1)[None, :]) & 1)
    return 0.5 * signs @ np.asarray(prefactors, dtype=float)


def spectrum_from_prefactors(prefactors: Sequence[float]) -> Spectrum1D:
    """All pairwise differences of the eigenvalue ladder, as a Spectrum1D.

    Equivalently the set {Σ c_i·p_i : c_i in {-1, 0, +1}}, which this
    enumerates in O(3^r) instead of O(4^r).
    """
    prefactors = _check_prefactors(prefactors)
    if _is_integral(prefactors):
        sums = np.array([0], dtype=np.int64)
        for p in prefactors:
            p = np.int64(round(p))
            sums = np.unique(np.add.outer(np.array([-p, 0, p], dtype=np.int64), sums))
        return Spectrum1D(tuple(int(v) for v in sums), is_integral=True)
    sums = np.array([0.0])
    for p in prefactors:
        sums = np.unique(np.add.outer(np.array([-p, 0.0, p]), sums))
    # merge near-duplicates, then enforce exact symmetry about 0
    merged = [sums[0]]
    for v in sums[1:]:
        if v - merged[-1] > _FLOAT_TOL:
            merged.append(v)
    half = [v for v in merged if v > _FLOAT_TOL]
    freqs = sorted([-v for v in half] + [0.0] + half)
    return Spectrum1D(tuple(freqs), is_integral=False)


def ternary_prefactors(length: int) -> list[int]:
    """Prefactors [3^0, ..., 3^(L-1)], whose spectrum is the dense set of size 3^L."""
    if length < 1:
        raise ConfigurationError(f"need at least one encoding, got length={length}")
    if length > _MAX_ENCODINGS:
        raise ResourceLimitError(f"length {length} exceeds the enumeration cap of {_MAX_ENCODINGS}")
    return [3**i for i in range(length)]


@dataclass(frozen=True)
class MixedSpectrum:
    """Per-dimension spectra plus a partition of dimensions into mixed groups.

    Inside a group, frequency vectors form the Cartesian product of the
    member dimensions' sets (other components zero); across groups only the
    per-group sets are available, never products between them.
    """

    dim_spectra: tuple
    groups: tuple

    def __post_init__(self):
        d = len(self.dim_spectra)
        flat = [dim for g in self.groups for dim in g]
        if sorted(flat) != list(range(d)):
            raise ConfigurationError(
                f"groups {self.groups} are not a partition of the {d} dimensions"
            )
        if any(len(g) == 0 for g in self.groups):
            raise ConfigurationError("empty group in partition")

    @property
    def n_dims(self) -> int:
        return len(self.dim_spectra)

    def group_cardinality(self, group_index: int) -> int:
        card = 1
        for dim in self.groups[group_index]:
            card *= len(self.dim_spectra[dim])
        return card

    def group_vectors(self, group_index: int) -> np.ndarray:
        """Materialize one group's frequency vectors, zeros outside the group."""
        card = self.group_cardinality(group_index)
        if card > _MAX_VECTORS:
            raise ResourceLimitError(
                f"group has {card} frequency vectors, above the {_MAX_VECTORS} cap"
            )
        dims = sorted(self.groups[group_index])
        axes = [np.asarray(self.dim_spectra[dim].frequencies) for dim in dims]
        mesh = np.meshgrid(*axes, indexing="ij")
        out = np.zeros((card, self.n_dims))
        for dim, m in zip(dims, mesh):
            out[:, dim] = m.reshape(-1)
        return out

    def all_vectors(self) -> np.ndarray:
        """Union of all groups' vectors (the zero vector appears once)."""
        parts = [self.group_vectors(g) for g in range(len(self.groups))]
        return np.unique(np.concatenate(parts, axis=0), axis=0)

    def contains_vector(self, vector: Sequence[float]) -> bool:
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.n_dims,):
            raise ContractViolationError(
                f"frequency vector has {vector.shape} entries, spectrum has {self.n_dims} dimensions"
            )
        for group in self.groups:
            group = set(group)
            ok = True
            for dim in range(self.n_dims):
                if dim in group:
                    ok = ok and (vector[dim] in self.dim_spectra[dim])
                else:
                    ok = ok and abs(vector[dim]) <= _FLOAT_TOL
            if ok:
                return True
        return False


@dataclass(frozen=True)
class MixedCardinality:
    """Cardinality report: per-group product counts and their plain sum.

    The all-zero vector belongs to every group; the sum counts it once per
    group, so the deduplicated vector-set size is total - shared_zero_overlap.
    """

    per_group: tuple
    total: int
    shared_zero_overlap: int


def mixed_cardinality(spec: MixedSpectrum) -> MixedCardinality:
    per_group = tuple(spec.group_cardinality(g) for g in range(len(spec.groups)))
    return MixedCardinality(
        per_group=per_group,
        total=int(sum(per_group)),
        shared_zero_overlap=len(spec.groups) - 1,
    )


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    missing: tuple


def covers(spec, targets) -> CoverageReport:
    """Check that every target frequency (or vector) lies in the spectrum."""
    missing = []
    if isinstance(spec, Spectrum1D):
        for t in targets:
            if np.ndim(t) != 0:
                raise ContractViolationError("scalar frequencies expected for a 1-D spectrum")
            if t not in spec:
                missing.append(t)
    elif isinstance(spec, MixedSpectrum):
        for t in targets:
            if not spec.contains_vector(t):
                missing.append(tuple(t))
    else:
        raise ContractViolationError(f"unsupported spectrum type {type(spec).__name__}")
    return CoverageReport(covered=not missing, missing=tuple(missing))
