"""Frequency-spectrum algebra against brute-force enumeration."""

import numpy as np
import pytest

from pqcfourier import (
    ConfigurationError,
    ContractViolationError,
    MixedSpectrum,
    ResourceLimitError,
    covers,
    eigenvalue_ladder,
    mixed_cardinality,
    spectrum_from_prefactors,
    ternary_prefactors,
)


def brute_force_spectrum(prefactors):
    """All pairwise eigenvalue differences, enumerated over 2^r x 2^r pairs."""
    lam = eigenvalue_ladder(prefactors)
    diffs = set()
    for a in lam:
        for b in lam:
            diffs.add(round(a - b, 12))
    return sorted(diffs)


def test_ladder_worked_example():
    # prefactors [10, 20]: generator eigenvalues (15, -5, 5, -15)
    lam = eigenvalue_ladder([10, 20])
    assert lam.tolist() == [15.0, -5.0, 5.0, -15.0]


def test_ladder_signs_follow_bit_pattern():
    # bit j of the basis index flips prefactor r-1-j, matching the
    # (15, -5, 5, -15) ordering of the [10, 20] example
    lam = eigenvalue_ladder([2, 6])
    expected = [0.5 * (2 + 6), 0.5 * (2 - 6), 0.5 * (-2 + 6), 0.5 * (-2 - 6)]
    assert np.allclose(lam, expected)


def test_selection_worked_example():
    spec = spectrum_from_prefactors([10, 20])
    assert spec.frequencies == (-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0)
    assert spec.max_frequency == 30.0


def test_ternary_prefactors_values():
    assert ternary_prefactors(4) == [1, 3, 9, 27]


@pytest.mark.parametrize("length", range(1, 7))
def test_ternary_cardinality(length):
    spec = spectrum_from_prefactors(ternary_prefactors(length))
    assert len(spec) == 3**length


@pytest.mark.parametrize("seed", range(12))
def test_matches_brute_force_enumeration(seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, 6))
    prefactors = np.round(rng.uniform(0.5, 20.0, r), 3)
    spec = spectrum_from_prefactors(prefactors)
    expected = brute_force_spectrum(prefactors)
    assert np.allclose(sorted(spec.frequencies), expected, atol=1e-9)


def test_spectrum_symmetry_and_zero():
    for seed in range(8):
        rng = np.random.default_rng(100 + seed)
        prefactors = rng.uniform(0.1, 9.0, int(rng.integers(1, 5)))
        freqs = np.asarray(spectrum_from_prefactors(prefactors).frequencies)
        assert 0.0 in freqs
        # symmetric: sorted(-freqs) == sorted(freqs)
        assert np.allclose(np.sort(-freqs), freqs, atol=1e-9)


def test_membership_tolerance():
    spec = spectrum_from_prefactors([10, 20])
    assert 10 in spec
    assert 10.0 + 1e-10 in spec
    assert 10.5 not in spec
    assert -30 in spec


def test_degenerate_prefactors_shrink_spectrum():
    # equal prefactors collide: [5, 5] gives {0, +-5, +-10}, not 3^2 values
    spec = spectrum_from_prefactors([5, 5])
    assert spec.frequencies == (-10.0, -5.0, 0.0, 5.0, 10.0)


def test_prefactor_validation():
    with pytest.raises(ConfigurationError):
        spectrum_from_prefactors([])
    with pytest.raises(ConfigurationError):
        spectrum_from_prefactors([1.0, -2.0])
    with pytest.raises(ConfigurationError):
        spectrum_from_prefactors([np.inf])
    with pytest.raises(ResourceLimitError):
        spectrum_from_prefactors([1.0] * 64)


def _ladder_mixed(groups):
    one = spectrum_from_prefactors([10, 30])
    return MixedSpectrum(dim_spectra=(one,) * 4, groups=groups)


def test_mixed_cardinality_4d_separated():
    card = mixed_cardinality(_ladder_mixed(((0, 1), (2, 3))))
    assert card.per_group == (81, 81)
    assert card.total == 162
    assert card.shared_zero_overlap == 1


def test_mixed_cardinality_4d_all_mixed():
    card = mixed_cardinality(_ladder_mixed(((0, 1, 2, 3),)))
    assert card.per_group == (6561,)
    assert card.total == 6561
    assert card.shared_zero_overlap == 0


def test_group_vectors_cartesian_structure():
    mixed = _ladder_mixed(((0, 1), (2, 3)))
    vecs = mixed.group_vectors(1)
    assert vecs.shape == (81, 4)
    # outside-group components are zero; inside-group columns hit all 9 values
    assert np.all(vecs[:, :2] == 0)
    assert len(np.unique(vecs[:, 2])) == 9
    unique_rows = np.unique(vecs, axis=0)
    assert unique_rows.shape[0] == 81


def test_all_vectors_dedupes_shared_zero():
    mixed = _ladder_mixed(((0, 1), (2, 3)))
    vecs = mixed.all_vectors()
    assert vecs.shape[0] == 162 - 1  # the zero vector is shared between groups


def test_contains_vector_respects_grouping():
    mixed = _ladder_mixed(((0, 1), (2, 3)))
    assert mixed.contains_vector([10, 40, 0, 0])
    assert mixed.contains_vector([0, 0, -20, 30])
    # cross-group mixing is not reachable under separation
    assert not mixed.contains_vector([10, 0, 10, 0])
    all_mixed = _ladder_mixed(((0, 1, 2, 3),))
    assert all_mixed.contains_vector([10, 0, 10, 0])


def test_contains_vector_shape_check():
    mixed = _ladder_mixed(((0, 1), (2, 3)))
    with pytest.raises(ContractViolationError):
        mixed.contains_vector([10, 0])


def test_group_partition_validation():
    one = spectrum_from_prefactors([10])
    with pytest.raises(ConfigurationError):
        MixedSpectrum(dim_spectra=(one, one), groups=((0,),))
    with pytest.raises(ConfigurationError):
        MixedSpectrum(dim_spectra=(one, one), groups=((0, 0), (1,)))


def test_covers_scalar_and_vector_targets():
    spec = spectrum_from_prefactors([10, 20])
    report = covers(spec, [10, 20, 30])
    assert report.covered and report.missing == ()
    report = covers(spec, [10, 25])
    assert not report.covered and report.missing == (25,)

    mixed = _ladder_mixed(((0, 1), (2, 3)))
    report = covers(mixed, [(20, 30, 0, 0), (0, 0, 10, 20)])
    assert report.covered
    report = covers(mixed, [(20, 0, 30, 0)])
    assert not report.covered
