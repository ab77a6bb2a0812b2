"""DFT coefficient extraction, classical least squares, run summaries."""

import numpy as np
import pytest

from pqcfourier import (
    ConfigurationError,
    ContractViolationError,
    DegenerateDataError,
    ModelConfig,
    TargetSpec,
    build_circuit,
    coefficient_diff,
    dft_coefficients,
    fourier_least_squares,
    grid_dataset,
    model_coefficients,
    target_2d,
    target_4d,
    target_coefficients,
)
from pqcfourier.analysis import dft_grid


def test_dft_grid_excludes_right_endpoint():
    rows = dft_grid(8, 1)
    assert rows.shape == (8, 1)
    assert rows[0, 0] == -np.pi
    assert rows[-1, 0] < np.pi
    assert np.allclose(np.diff(rows[:, 0]), 2 * np.pi / 8)


def test_cosine_coefficients_worked_example():
    # f(x) = cos(10 x): c_{+-10} = 0.5 exactly at n = 128
    table = dft_coefficients(
        lambda rows: np.cos(10 * rows[:, 0]), [(10,), (-10,), (0,)], n_grid=128
    )
    assert abs(table.get((10,)) - 0.5) < 1e-10
    assert abs(table.get((-10,)) - 0.5) < 1e-10
    assert abs(table.get((0,))) < 1e-10


def test_sine_phase_convention():
    # f(x) = sin(3 x) = (e^{i3x} - e^{-i3x}) / (2i): c_3 = -i/2
    table = dft_coefficients(lambda rows: np.sin(3 * rows[:, 0]), [(3,), (-3,)], n_grid=32)
    assert abs(table.get((3,)) - (-0.5j)) < 1e-12
    assert abs(table.get((-3,)) - 0.5j) < 1e-12


def test_random_series_round_trip_2d():
    rng = np.random.default_rng(4)
    freqs = [(1, 2), (3, -1), (0, 4), (2, 0)]
    coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
    spec = TargetSpec(d=2, c0=0.25, terms=tuple(
        (tuple(float(w) for w in f), complex(c)) for f, c in zip(freqs, coeffs)
    ))
    from pqcfourier import eval_target_batch
    freq_set = freqs + [tuple(-w for w in f) for f in freqs] + [(0, 0)]
    table = dft_coefficients(lambda rows: eval_target_batch(spec, rows), freq_set, n_grid=16)
    for f, c in zip(freqs, coeffs):
        assert abs(table.get(f) - c) < 1e-12
        assert abs(table.get(tuple(-w for w in f)) - np.conj(c)) < 1e-12
    assert abs(table.get((0, 0)) - 0.25) < 1e-12
    assert table.hermitian_violation() < 1e-12


def test_high_dimensional_reduction_path():
    # d = 3 exercises the per-vector tensordot reduction instead of fftn
    spec = TargetSpec(d=3, c0=-0.1, terms=(((1.0, 0.0, 2.0), 0.3 + 0.4j),))
    from pqcfourier import eval_target_batch
    table = dft_coefficients(
        lambda rows: eval_target_batch(spec, rows),
        [(1, 0, 2), (-1, 0, -2), (0, 0, 0), (1, 1, 1)],
        n_grid=8,
    )
    assert abs(table.get((1, 0, 2)) - (0.3 + 0.4j)) < 1e-12
    assert abs(table.get((0, 0, 0)) + 0.1) < 1e-12
    assert abs(table.get((1, 1, 1))) < 1e-12


def test_nyquist_guard_names_the_frequency():
    with pytest.raises(ConfigurationError, match="20"):
        dft_coefficients(lambda rows: np.cos(20 * rows[:, 0]), [(20,)], n_grid=16)


def test_known_support_permits_sub_nyquist_grid():
    # support {0, +-10} with n = 32: residues 0, 10, 22 are collision-free
    table = dft_coefficients(
        lambda rows: np.cos(10 * rows[:, 0]),
        [(10,), (-10,), (0,)],
        n_grid=32,
        known_support=[(0,), (10,), (-10,)],
    )
    assert abs(table.get((10,)) - 0.5) < 1e-10


def test_known_support_collision_rejected():
    # 16 and -16 alias to the same residue mod 32
    with pytest.raises(ConfigurationError):
        dft_coefficients(
            lambda rows: np.cos(16 * rows[:, 0]),
            [(16,)],
            n_grid=32,
            known_support=[(16,), (-16,)],
        )


def test_non_integer_frequency_rejected():
    with pytest.raises(ConfigurationError):
        dft_coefficients(lambda rows: rows[:, 0], [(0.5,)], n_grid=16)


def test_model_coefficients_match_target_after_training_free_case():
    # theta = 0 keeps the 1-qubit model at cos(x): c_{+-1} = 0.5
    circuit = build_circuit(ModelConfig("parallel", ((1.0,),), ((0,),), 1))
    table = model_coefficients(circuit, np.zeros(circuit.n_params), n_grid=16)
    assert abs(table.get((1,)) - 0.5) < 1e-12
    assert abs(table.get((-1,)) - 0.5) < 1e-12
    assert abs(table.get((0,))) < 1e-12


def test_target_coefficients_analytic_and_scaled():
    spec = target_2d()
    table = target_coefficients(spec)
    assert table.n_grid == 0  # analytic, no sampling
    assert abs(table.get((10, 10)) - (0.05 + 0.05j)) < 1e-15
    assert abs(table.get((0, 0)) - 0.5) < 1e-15
    scaled = target_coefficients(spec, output_scaling=(2.0, -1.0))
    assert abs(scaled.get((10, 10)) - (0.1 + 0.1j)) < 1e-15
    assert abs(scaled.get((0, 0)) - 0.0) < 1e-15


def test_coefficient_diff_alignment():
    spec = target_2d()
    a = target_coefficients(spec)
    b = target_coefficients(spec, output_scaling=(1.0, 0.25))
    diff = coefficient_diff(a, b)
    assert abs(diff.max_abs - 0.25) < 1e-15
    assert diff.max_abs_frequency == (0, 0)
    table_other = target_coefficients(spec, freq_set=[(10, 10)])
    with pytest.raises(ContractViolationError):
        coefficient_diff(a, table_other)


def test_coefficient_table_csv(tmp_path):
    table = target_coefficients(target_2d())
    path = tmp_path / "coeffs.csv"
    table.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "omega_1,omega_2,re,im"
    assert len(lines) == len(table) + 1


def test_fourier_least_squares_recovers_targets():
    fit = fourier_least_squares(grid_dataset(target_2d(), 12), target_2d().frequency_vectors())
    assert fit.r2_train > 0.999999
    assert fit.r2_test > 0.999999
    fit4 = fourier_least_squares(grid_dataset(target_4d(), 12), target_4d().frequency_vectors())
    assert fit4.r2_train > 0.999999


def test_fourier_least_squares_prediction_shape():
    ds = grid_dataset(target_2d(), 10)
    fit = fourier_least_squares(ds, target_2d().frequency_vectors())
    pred = fit.predict(ds.inputs)
    assert pred.shape == (ds.n_rows,)
    assert np.corrcoef(pred, ds.targets)[0, 1] > 0.9999


def test_fourier_least_squares_needs_enough_rows():
    xs = np.linspace(-np.pi, np.pi, 6).reshape(-1, 1)
    from pqcfourier import minmax_scale
    tiny = minmax_scale(xs, np.cos(xs[:, 0]))
    with pytest.raises(ContractViolationError):
        fourier_least_squares(tiny, [(1,), (2,), (3,), (4,), (5,)])


def test_fourier_least_squares_rank_deficiency():
    # duplicated frequency rows make the design matrix rank deficient
    ds = grid_dataset(target_2d(), 10)
    with pytest.raises(DegenerateDataError):
        fourier_least_squares(ds, [(10, 10), (10, 10)])
