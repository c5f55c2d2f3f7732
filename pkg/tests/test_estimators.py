"""Tests for the structured estimator constructors and fast paths."""

import numpy as np
import pytest

from specbound import estimators as est
from specbound import quadform as qf
from specbound.signals import sample_geometric_paths

from conftest import random_estimator_spec


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(321)


# ---------------------------------------------------------------- windows


@pytest.mark.parametrize("kind", est.WINDOW_KINDS)
@pytest.mark.parametrize("length", [1, 2, 3, 8, 33])
def test_taper_windows_are_symmetric_and_in_range(kind, length):
    values = est.taper_window(kind, length)
    assert values.shape == (length,)
    np.testing.assert_allclose(values, values[::-1], atol=1e-15)
    assert values.min() >= 0.0 and values.max() <= 1.0


def test_length_one_window_is_unit():
    for kind in est.WINDOW_KINDS:
        np.testing.assert_array_equal(est.taper_window(kind, 1), [1.0])


def test_lag_window_peaks_at_zero_lag():
    for kind in est.WINDOW_KINDS:
        weights = est.lag_window(kind, 5)
        assert weights.shape == (9,)
        assert weights[4] == pytest.approx(1.0)
        np.testing.assert_allclose(weights, weights[::-1], atol=1e-15)


def test_unknown_window_kind_raises():
    with pytest.raises(ValueError):
        est.taper_window("kaiser", 8)


def test_custom_lag_window_must_be_symmetric():
    with pytest.raises(ValueError):
        est.BlackmanTukey(2, np.array([0.1, 1.0, 0.2])).weights()
    custom = est.BlackmanTukey(2, np.array([0.5, 1.0, 0.5]))
    np.testing.assert_array_equal(custom.weights(), [0.5, 1.0, 0.5])


# ---------------------------------------------------------------- matrices


def test_biased_periodogram_matrix():
    form = est.build_matrix(est.BiasedPeriodogram(), 3)
    np.testing.assert_allclose(form.matrix, np.full((3, 3), 1.0 / 3.0))


def test_unbiased_periodogram_matrix():
    form = est.build_matrix(est.UnbiasedPeriodogram(), 2)
    np.testing.assert_allclose(form.matrix, [[0.5, 1.0], [1.0, 0.5]])


def test_block_average_matrix():
    form = est.build_matrix(est.Bartlett(2), 4)
    block = 0.25 * np.ones((2, 2))
    expected = np.block([[block, np.zeros((2, 2))], [np.zeros((2, 2)), block]])
    np.testing.assert_array_equal(form.matrix, expected)


def test_rectangular_non_overlapping_welch_equals_block_average():
    welch = est.build_matrix(est.Welch(4, 4, "rectangular"), 12)
    bartlett = est.build_matrix(est.Bartlett(4), 12)
    np.testing.assert_allclose(welch.matrix, bartlett.matrix, atol=1e-15)


def test_build_matrix_size_errors():
    with pytest.raises(ValueError):
        est.build_matrix(est.Bartlett(3), 10)
    with pytest.raises(ValueError):
        est.build_matrix(est.Welch(8, 4), 13)
    with pytest.raises(ValueError):
        est.build_matrix(est.BlackmanTukey(9), 8)


def test_diagonals_vanish_beyond_truncation():
    # the closed-form width is an upper bound: zero-endpoint windows can shrink it
    for spec, n in [
        (est.BlackmanTukey(3, "hann"), 12),
        (est.Bartlett(4), 16),
        (est.Welch(6, 3, "hamming"), 15),
    ]:
        form = est.build_matrix(spec, n)
        width = est.certificate_params(spec, n).truncation
        assert form.truncation_width <= width
        assert all(
            not np.any(form.diagonal(k)) for k in range(width, n)
        )


def test_periodogram_norm_obstruction():
    # both periodogram variants have max(||A||, ||A||_F^2) >= 1 at every size
    for n in (2, 5, 16, 64):
        for spec in (est.BiasedPeriodogram(), est.UnbiasedPeriodogram()):
            form = est.build_matrix(spec, n)
            assert max(form.spectral_norm, form.frobenius_norm ** 2) >= 1.0 - 1e-12


# ---------------------------------------------------------------- diagonal sums


def test_biased_periodogram_bias_sequence():
    coeffs = est.closed_form_bias(est.BiasedPeriodogram(), 4)
    for k, value in [(0, 1.0), (1, 0.75), (2, 0.5), (3, 0.25), (4, 0.0)]:
        assert coeffs.at(k) == pytest.approx(value)
        assert coeffs.at(-k) == pytest.approx(value)


def test_unbiased_periodogram_bias_is_one():
    coeffs = est.closed_form_bias(est.UnbiasedPeriodogram(), 6)
    assert all(coeffs.at(k) == 1.0 for k in range(-5, 6))


def test_block_average_bias_closed_form():
    coeffs = est.closed_form_bias(est.Bartlett(2), 4)
    assert coeffs.at(1) == pytest.approx(0.5)
    assert coeffs.at(2) == 0.0


def test_tapered_segment_bias_two_ways(rng):
    spec = est.Welch(4, 2, "hann")
    closed = est.closed_form_bias(spec, 10)
    brute = qf.bias_coefficients(est.build_matrix(spec, 10))
    assert np.abs(closed.values - brute.values).max() <= 1e-12


def test_closed_form_bias_matches_brute_force_random_specs(rng):
    for _ in range(25):
        spec, n = random_estimator_spec(rng, max_samples=48)
        closed = est.closed_form_bias(spec, n)
        brute = qf.bias_coefficients(est.build_matrix(spec, n))
        assert np.abs(closed.values - brute.values).max() <= 1e-12


# ---------------------------------------------------------------- fast paths


def test_single_block_average_is_biased_periodogram(rng):
    data = qf.DataMatrix(rng.standard_normal((1, 8)))
    grid = qf.frequency_grid(9, full_range=True)
    bartlett = est.evaluate_fast(est.Bartlett(8), data, grid)
    periodogram = est.evaluate_fast(est.BiasedPeriodogram(), data, grid)
    np.testing.assert_allclose(bartlett.matrices, periodogram.matrices, atol=1e-12)


def test_single_segment_welch_is_tapered_periodogram(rng):
    data = qf.DataMatrix(rng.standard_normal((2, 8)))
    grid = qf.frequency_grid(7)
    spec = est.Welch(8, 3, "hann")
    fast = est.evaluate_fast(spec, data, grid)
    generic = qf.evaluate_generic_grid(data, est.build_matrix(spec, 8), grid)
    assert np.abs(fast.matrices - generic.matrices).max() < 1e-10


def test_fast_paths_match_generic_oracle(rng):
    data = qf.DataMatrix(rng.standard_normal((2, 16)))
    grid = qf.frequency_grid(33, full_range=True)
    specs = [
        est.BiasedPeriodogram(),
        est.UnbiasedPeriodogram(),
        est.BlackmanTukey(5, "hamming"),
        est.Bartlett(4),
        est.Welch(8, 4, "hann"),
    ]
    for spec in specs:
        fast = est.evaluate_fast(spec, data, grid)
        generic = qf.evaluate_generic_grid(data, est.build_matrix(spec, 16), grid)
        assert np.abs(fast.matrices - generic.matrices).max() < 1e-10


# ---------------------------------------------------------------- autocovariance


def test_biased_acs_hand_values():
    seq = est.biased_acs(qf.DataMatrix([[1.0, 1.0]]))
    assert seq.at(0)[0, 0] == pytest.approx(1.0)
    assert seq.at(1)[0, 0] == pytest.approx(0.5)
    flipped = est.biased_acs(qf.DataMatrix([[1.0, -1.0]]))
    assert flipped.at(1)[0, 0] == pytest.approx(-0.5)


def test_unbiased_acs_hand_value_and_identity(rng):
    seq = est.unbiased_acs(qf.DataMatrix([[1.0, 1.0]]))
    assert seq.at(1)[0, 0] == pytest.approx(1.0)
    data = qf.DataMatrix(rng.standard_normal((2, 12)))
    biased = est.biased_acs(data)
    unbiased = est.unbiased_acs(data)
    for k in range(-11, 12):
        np.testing.assert_allclose(
            unbiased.at(k), biased.at(k) * 12.0 / (12 - abs(k)), atol=1e-12
        )


def test_acs_transposition_symmetry(rng):
    data = qf.DataMatrix(rng.standard_normal((3, 9)))
    seq = est.biased_acs(data)
    for k in range(9):
        np.testing.assert_allclose(seq.at(-k), seq.at(k).T, atol=1e-15)


def test_periodogram_from_biased_acs_matches_generic(rng):
    data = qf.DataMatrix(rng.standard_normal((1, 10)))
    grid = qf.frequency_grid(11, full_range=True)
    seq = est.biased_acs(data)
    phases = np.exp(-2j * np.pi * np.outer(grid, seq.offsets))
    direct = np.einsum("fk,kij->fij", phases, seq.values)
    generic = qf.evaluate_generic_grid(data, est.build_matrix(est.BiasedPeriodogram(), 10), grid)
    assert np.abs(direct - generic.matrices).max() < 1e-10


def test_unbiased_acs_is_unbiased_monte_carlo():
    # mean of the divisor-corrected estimate equals the true autocovariance
    trials, samples, rho = 10_000, 32, 0.4
    paths = sample_geometric_paths(rho, samples, trials, "gaussian", seed=9)
    for lag in range(5):
        per_trial = (paths[:, lag:] * paths[:, : samples - lag]).sum(axis=1) / (samples - lag)
        spread = per_trial.std(ddof=1) / np.sqrt(trials)
        assert abs(per_trial.mean() - rho ** lag) <= 3.0 * spread


# ---------------------------------------------------------------- certificate parameters


def test_certificate_params_closed_forms():
    params = est.certificate_params(est.BlackmanTukey(8), 128)
    assert params.envelope == pytest.approx(15.0 / 128.0) and params.truncation == 8
    params = est.certificate_params(est.Bartlett(8), 128)
    assert params.envelope == pytest.approx(1.0 / 16.0) and params.truncation == 8
    params = est.certificate_params(est.Welch(8, 4), 128)
    assert params.envelope == pytest.approx(5.0 / 31.0) and params.truncation == 8


def test_certificate_params_unavailable_for_periodograms():
    assert est.certificate_params(est.BiasedPeriodogram(), 64) is None
    assert est.certificate_params(est.UnbiasedPeriodogram(), 64) is None


def test_block_average_norms_are_exact():
    for m, n in [(2, 8), (4, 16), (8, 64)]:
        form = est.build_matrix(est.Bartlett(m), n)
        assert form.spectral_norm == pytest.approx(m / n, abs=1e-12)
        assert form.frobenius_norm ** 2 == pytest.approx(m / n, abs=1e-12)


def test_welch_norm_envelopes(rng):
    for m, k, segments in [(8, 4, 7), (6, 2, 5), (5, 5, 4)]:
        n = (segments - 1) * k + m
        spec = est.Welch(m, k, "hann" if m > 2 else "rectangular")
        form = est.build_matrix(spec, n)
        params = est.certificate_params(spec, n)
        ceil_ratio = -(-m // k)
        assert form.spectral_norm <= ceil_ratio / segments + 1e-9
        assert form.frobenius_norm ** 2 <= params.envelope + 1e-9
        for offset in range(params.truncation):
            profile = qf.diagonal_profile(form, offset)
            assert profile.sup_norm <= params.envelope + 1e-9
            assert profile.l2_norm ** 2 <= params.envelope + 1e-9
