"""Tests for the generic quadratic-form machinery."""

import numpy as np
import pytest

from specbound import quadform as qf
from specbound.signals import GeometricScalar, WhiteNoise


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(20240311)


def _brute_expansion(data, form, frequency):
    """Independent oracle: sum of e^{-j2 pi s k} Y B[k] Y^T over all diagonals."""
    n = form.size
    y = data.values
    total = np.zeros((data.channels, data.channels), dtype=complex)
    for k in range(-(n - 1), n):
        dense = qf.diagonal_profile(form, k).embed(n)
        total += np.exp(-2j * np.pi * frequency * k) * (y @ dense @ y.T)
    return total


def test_identity_frequency_is_plain_quadratic_form(rng):
    data = qf.DataMatrix(rng.standard_normal((2, 6)))
    form = qf.QuadraticForm(rng.standard_normal((6, 6)))
    value = qf.evaluate_generic(data, form, 0.0)
    expected = data.values @ form.matrix @ data.values.T
    np.testing.assert_allclose(value, expected, atol=1e-12)
    assert np.abs(value.imag).max() < 1e-12


def test_hand_expanded_two_sample_case():
    # Y = [1, 1], A = ones/2, s = 1/4: value (2 + e^{j pi/2} + e^{-j pi/2}) / 2 = 1
    data = qf.DataMatrix([[1.0, 1.0]])
    form = qf.QuadraticForm(0.5 * np.ones((2, 2)))
    value = qf.evaluate_generic(data, form, 0.25)
    np.testing.assert_allclose(value, [[1.0]], atol=1e-12)


@pytest.mark.parametrize("channels,samples", [(1, 5), (2, 8), (3, 12)])
def test_generic_matches_diagonal_expansion(rng, channels, samples):
    data = qf.DataMatrix(rng.standard_normal((channels, samples)))
    form = qf.QuadraticForm(rng.standard_normal((samples, samples)))
    for frequency in (-0.5, -0.17, 0.0, 0.31, 0.5):
        fast = qf.evaluate_generic(data, form, frequency)
        brute = _brute_expansion(data, form, frequency)
        assert np.abs(fast - brute).max() < 1e-10


def test_estimate_is_hermitian_before_and_after_symmetrization(rng):
    data = qf.DataMatrix(rng.standard_normal((3, 10)))
    form = qf.QuadraticForm(rng.standard_normal((10, 10)))
    phase = np.exp(-2j * np.pi * 0.21 * np.arange(10))
    rotated = data.values * phase
    raw = rotated @ form.matrix @ rotated.conj().T
    assert np.linalg.norm(raw - raw.conj().T) <= 1e-12 * np.linalg.norm(raw)
    value = qf.evaluate_generic(data, form, 0.21)
    np.testing.assert_array_equal(value, value.conj().T)


def test_negative_frequency_conjugates_the_estimate(rng):
    data = qf.DataMatrix(rng.standard_normal((2, 9)))
    form = qf.QuadraticForm(rng.standard_normal((9, 9)))
    plus = qf.evaluate_generic(data, form, 0.2)
    minus = qf.evaluate_generic(data, form, -0.2)
    np.testing.assert_allclose(minus, plus.conj(), atol=1e-12)


def test_dimension_mismatch_and_bad_data_raise(rng):
    form = qf.QuadraticForm(np.eye(4))
    with pytest.raises(ValueError):
        qf.evaluate_generic(qf.DataMatrix(np.ones((1, 5))), form, 0.0)
    with pytest.raises(ValueError):
        qf.DataMatrix(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        qf.QuadraticForm(np.ones((2, 3)))


def test_quadratic_form_symmetrizes_and_bounds_norms(rng):
    raw = rng.standard_normal((7, 7))
    form = qf.QuadraticForm(raw)
    np.testing.assert_array_equal(form.matrix, form.matrix.T)
    assert form.spectral_norm <= form.frobenius_norm + 1e-15


def test_diagonal_profile_constant_matrix():
    n = 6
    form = qf.QuadraticForm(np.full((n, n), 1.0 / n))
    for k in range(-(n - 1), n):
        profile = qf.diagonal_profile(form, k)
        np.testing.assert_allclose(profile.entries, np.full(n - abs(k), 1.0 / n))
        assert profile.sup_norm == pytest.approx(1.0 / n)
        assert profile.l2_norm ** 2 == pytest.approx((n - abs(k)) / n ** 2)


def test_diagonal_profile_block_diagonal_example():
    # two 2x2 blocks of ones, scaled by 1/4: first subdiagonal reads (1/4, 0, 1/4)
    block = np.ones((2, 2))
    matrix = 0.25 * np.block([[block, np.zeros((2, 2))], [np.zeros((2, 2)), block]])
    form = qf.QuadraticForm(matrix)
    profile = qf.diagonal_profile(form, 1)
    np.testing.assert_array_equal(profile.entries, [0.25, 0.0, 0.25])
    assert profile.sup_norm == 0.25
    assert profile.l2_norm ** 2 == pytest.approx(2.0 / 16.0)


def test_profile_norms_match_dense_embedding(rng):
    form = qf.QuadraticForm(rng.standard_normal((8, 8)))
    for k in range(-7, 8):
        profile = qf.diagonal_profile(form, k)
        dense = profile.embed(8)
        assert profile.sup_norm == pytest.approx(np.linalg.norm(dense, 2), abs=1e-13)
        assert profile.l2_norm == pytest.approx(np.linalg.norm(dense), abs=1e-13)
        sym = qf.diagonal_profile(form, -k)
        assert profile.sup_norm == pytest.approx(sym.sup_norm)


def test_profiles_reassemble_the_matrix(rng):
    form = qf.QuadraticForm(rng.standard_normal((9, 9)))
    total = sum(qf.diagonal_profile(form, k).embed(9) for k in range(-8, 9))
    np.testing.assert_array_equal(total, form.matrix)


def test_out_of_range_offset_raises():
    form = qf.QuadraticForm(np.eye(3))
    with pytest.raises(ValueError):
        qf.diagonal_profile(form, 3)


def test_truncation_width_values():
    assert qf.QuadraticForm(np.zeros((3, 3))).truncation_width == 0
    assert qf.QuadraticForm(np.eye(3)).truncation_width == 1
    banded = np.eye(5) + np.diag(np.ones(3), 2)
    assert qf.QuadraticForm(banded).truncation_width == 3


def test_bias_coefficients_ones_matrix():
    form = qf.QuadraticForm(np.full((4, 4), 0.25))
    coeffs = qf.bias_coefficients(form)
    assert coeffs.at(1) == pytest.approx(0.75)
    assert coeffs.at(0) == pytest.approx(1.0)
    assert coeffs.at(4) == 0.0


def test_bias_equals_sum_of_profile_and_is_even(rng):
    form = qf.QuadraticForm(rng.standard_normal((7, 7)))
    coeffs = qf.bias_coefficients(form)
    for k in range(-6, 7):
        assert coeffs.at(k) == pytest.approx(qf.diagonal_profile(form, k).entries.sum(), abs=1e-13)
        assert coeffs.at(k) == pytest.approx(coeffs.at(-k))


def test_expected_estimate_white_noise_is_flat(rng):
    form = qf.QuadraticForm(rng.standard_normal((6, 6)))
    coeffs = qf.bias_coefficients(form)
    grid = qf.frequency_grid(7, full_range=True)
    mean = qf.expected_estimate(form, WhiteNoise(1), grid)
    for idx in range(grid.size):
        np.testing.assert_allclose(mean[idx], [[coeffs.at(0)]], atol=1e-12)


def test_expected_estimate_block_average_closed_form():
    # diagonal sums 1 - |k|/m on the geometric model, summed directly
    from specbound.estimators import Bartlett, closed_form_bias

    model = GeometricScalar(0.5)
    m, n = 4, 16
    coeffs = closed_form_bias(Bartlett(m), n)
    grid = np.array([0.0, 0.125, 0.4])
    mean = qf.expected_estimate(coeffs, model, grid)
    for idx, s in enumerate(grid):
        expected = sum(
            (1.0 - abs(k) / m) * 0.5 ** abs(k) * np.exp(-2j * np.pi * s * k)
            for k in range(-(m - 1), m)
        )
        np.testing.assert_allclose(mean[idx], [[expected]], atol=1e-12)


def test_expected_estimate_matches_monte_carlo_mean():
    # independent estimator implementation straight from the block-average
    # definition, averaged over 20000 paths, against the analytic mean
    from specbound.signals import sample_geometric_paths

    rho, m, blocks = 0.3, 8, 8
    samples = m * blocks
    trials = 20_000
    model = GeometricScalar(rho)
    grid = np.array([0.0, 0.13, 0.37])
    coeffs_values = np.where(
        np.abs(np.arange(-(samples - 1), samples)) < m,
        1.0 - np.abs(np.arange(-(samples - 1), samples)) / m,
        0.0,
    )
    expected = qf.expected_estimate(qf.BiasCoefficients(coeffs_values), model, grid)[:, 0, 0]
    paths = sample_geometric_paths(rho, samples, trials, "gaussian", seed=606)
    segments = paths.reshape(trials, blocks, m)
    phases = np.exp(-2j * np.pi * np.outer(np.arange(m), grid))
    transforms = segments @ phases
    per_trial = (np.abs(transforms) ** 2).sum(axis=1) / samples
    mean = per_trial.mean(axis=0)
    spread = per_trial.std(axis=0, ddof=1) / np.sqrt(trials)
    assert np.all(np.abs(mean - expected.real) <= 3.0 * spread)


def test_expected_estimate_all_ones_is_truncated_transform():
    model = GeometricScalar(0.4)
    half = 8
    coeffs = qf.BiasCoefficients(np.ones(2 * half - 1))
    grid = np.array([0.05, 0.3])
    mean = qf.expected_estimate(coeffs, model, grid)
    for idx, s in enumerate(grid):
        expected = sum(0.4 ** abs(k) * np.exp(-2j * np.pi * s * k) for k in range(-(half - 1), half))
        np.testing.assert_allclose(mean[idx], [[expected]], atol=1e-12)


def test_expected_estimate_needs_analytic_model(rng):
    coeffs = qf.BiasCoefficients(np.ones(3))
    with pytest.raises(TypeError):
        qf.expected_estimate(coeffs, object(), [0.0])


def test_exact_bias_sup_pure_truncation():
    # all-ones diagonal sums leave only the tail: exactly 2 rho^H / (1 - rho)
    model = GeometricScalar(0.3)
    half = 6
    coeffs = qf.BiasCoefficients(np.ones(2 * half - 1))
    value = qf.exact_bias_sup(coeffs, model, qf.frequency_grid(33))
    assert value == pytest.approx(2.0 * 0.3 ** half / 0.7, rel=1e-12)


def test_exact_bias_sup_single_point_white_noise():
    coeffs = qf.BiasCoefficients(np.array([0.0, 0.25, 0.0]))
    value = qf.exact_bias_sup(coeffs, WhiteNoise(1), np.array([0.0]))
    assert value == pytest.approx(0.75)


def test_frequency_grid_endpoints():
    grid = qf.frequency_grid(101)
    assert grid[0] == 0.0 and grid[-1] == 0.5 and grid.size == 101
    full = qf.frequency_grid(11, full_range=True)
    assert full[0] == -0.5 and full[-1] == 0.5
    assert qf.frequency_grid(1).tolist() == [0.0]
    with pytest.raises(ValueError):
        qf.frequency_grid(0)


def test_spectral_estimate_validation_and_sup(rng):
    grid = qf.frequency_grid(5)
    mats = np.stack([np.eye(2, dtype=complex) * (i + 1) for i in range(5)])
    estimate = qf.SpectralEstimate(grid, mats)
    assert estimate.sup_norm() == pytest.approx(5.0)
    with pytest.raises(ValueError):
        qf.SpectralEstimate(grid, mats[:3])
