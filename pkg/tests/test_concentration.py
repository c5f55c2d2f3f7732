"""Tests for the tail-bound primitives and the Monte Carlo verifier."""

import math

import numpy as np
import pytest

from specbound import bounds as bd
from specbound import concentration as cc
from specbound.constants import GAUSSIAN, constants_for, sub_gaussian


# ---------------------------------------------------------------- tail bounds


def test_hanson_wright_cap_and_branch_point():
    assert cc.hanson_wright_tail(0.0, 1.0, 1.0, 1.0) == 1.0
    # unit norms at eps = 2048: both branches give exponent one
    assert cc.hanson_wright_tail(2048.0, 1.0, 1.0, 1.0) == pytest.approx(2.0 / math.e, rel=1e-12)
    with pytest.raises(ValueError):
        cc.hanson_wright_tail(-1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        cc.hanson_wright_tail(1.0, 0.0, 1.0, 1.0)


def test_tail_bounds_are_nonincreasing_and_capped():
    grid = np.linspace(0.0, 5e4, 60)
    hw = [cc.hanson_wright_tail(e, 1.0, 2.0, 1.5) for e in grid]
    gauss = [cc.gaussian_hw_tail(e, 2.0, 1.5) for e in grid]
    for series in (hw, gauss):
        assert all(0.0 <= v <= 1.0 for v in series)
        assert all(a >= b - 1e-15 for a, b in zip(series, series[1:]))
    # positive before the exponent underflows
    assert all(cc.gaussian_hw_tail(e, 2.0, 1.5) > 0.0 for e in np.linspace(0.0, 1e3, 20))


def test_gaussian_tail_branch_equality_point():
    # eps^2 / F^2 = eps / S = 8 makes the exponent exactly one
    frob = math.sqrt(8.0) / math.sqrt(2.0)  # eps = sqrt(8 F^2) = 8 S
    spec_norm = 1.0
    eps = 8.0 * spec_norm
    frob = eps / math.sqrt(8.0)
    assert cc.gaussian_hw_tail(eps, frob, spec_norm) == pytest.approx(1.0 / math.e, rel=1e-12)
    assert cc.gaussian_hw_tail(0.0, 1.0, 1.0) == 1.0


def test_gaussian_tail_dominates_unit_psi2_tail():
    for eps in np.linspace(0.01, 500.0, 40):
        assert cc.gaussian_hw_tail(eps, 1.3, 0.8) <= cc.hanson_wright_tail(eps, 1.0, 1.3, 0.8)


def test_subexponential_tail_values():
    assert cc.subexp_tail(0.0, 1.0, 1.0) == 1.0
    assert cc.subexp_tail(2.0, 1.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)
    crossing = cc.subexp_tail(1.0, 1.0, 1.0)  # t = nu^2 / alpha
    assert crossing == pytest.approx(math.exp(-0.5), rel=1e-12)
    with pytest.raises(ValueError):
        cc.subexp_tail(-1.0, 1.0, 1.0)


# ---------------------------------------------------------------- moment facts


def test_subgaussian_fact_values():
    assert cc.subgaussian_fact("even_moment", k=1, b=1.0) == pytest.approx(2.0)
    assert cc.subgaussian_fact("even_moment", k=0, b=3.0) == pytest.approx(2.0)
    assert cc.subgaussian_fact("tail", t=0.0, b=1.0) == pytest.approx(2.0)
    psi2 = cc.subgaussian_fact("psi2_from_sigma", sigma=math.sqrt(3.0))
    assert psi2 == pytest.approx(math.sqrt(8.0), rel=1e-12)
    assert psi2 <= 2.0 * math.sqrt(3.0)
    # uniform on [-sqrt(3), sqrt(3)] has unit variance, below sigma^2 = 3
    assert 1.0 <= cc.subgaussian_fact("variance", sigma=math.sqrt(3.0))
    assert cc.subgaussian_fact("centered_square_moment", k=2, b=1.0) == pytest.approx(16.0)
    assert cc.subgaussian_fact("mgf", lam=0.5, b=1.0) == pytest.approx(math.exp(1.0), rel=1e-12)


def test_subgaussian_spec_defaults_and_invariant():
    spec = cc.SubGaussianSpec(math.sqrt(3.0))
    assert spec.psi2_bound == pytest.approx(2.0 * math.sqrt(3.0))
    tight = cc.SubGaussianSpec(1.5, psi2_bound=2.0)
    assert tight.psi2_bound == 2.0
    with pytest.raises(ValueError):
        cc.SubGaussianSpec(1.0, psi2_bound=2.5)
    with pytest.raises(ValueError):
        cc.SubGaussianSpec(-1.0)


def test_subexponential_spec_tail_delegates():
    spec = cc.SubExponentialSpec(1.0, 1.0)
    assert spec.tail(2.0) == cc.subexp_tail(2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        cc.SubExponentialSpec(-1.0, 1.0)


def test_square_mgf_domain():
    assert cc.subgaussian_fact("square_mgf", lam=0.25, b=1.0) == pytest.approx(math.exp(1.0), rel=1e-12)
    with pytest.raises(ValueError):
        cc.subgaussian_fact("square_mgf", lam=0.3, b=1.0)
    with pytest.raises(ValueError):
        cc.subgaussian_fact("nonsense", x=1.0)


# ---------------------------------------------------------------- consistency with the certificate engine


def test_data_matrix_tail_inverts_pointwise_condition():
    rng = np.random.default_rng(17)
    for _ in range(100):
        assumption = GAUSSIAN if rng.random() < 0.5 else sub_gaussian(1.0 + 2.0 * rng.random())
        phi = 10.0 ** rng.uniform(-1.0, 1.0)
        channels = int(rng.integers(1, 4))
        ctx = bd.BoundContext(assumption, phi, 1.0, channels)
        xi = 10.0 ** rng.uniform(-5.0, 0.0)
        delta = rng.uniform(0.01, 0.5)
        eps_star = bd.pointwise_error_bound(xi, delta, ctx).value
        tail = cc.data_matrix_tail(
            eps_star, xi, math.sqrt(xi), phi, channels, constants_for(assumption)
        )
        assert tail == pytest.approx(delta, rel=1e-9)


# ---------------------------------------------------------------- Monte Carlo verifier


def _gaussian_quadform_setup(dim, seed):
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((dim, dim))
    matrix = 0.5 * (raw + raw.T)
    frob = float(np.linalg.norm(matrix))
    spec_norm = float(np.abs(np.linalg.eigvalsh(matrix)).max())
    trace = float(np.trace(matrix))

    def sampler(stream, count):
        return stream.standard_normal((count, dim))

    def statistic(batch):
        return np.einsum("ti,ij,tj->t", batch, matrix, batch) - trace

    return sampler, statistic, frob, spec_norm


def test_monte_carlo_flags_nothing_on_proven_bound():
    sampler, statistic, frob, spec_norm = _gaussian_quadform_setup(4, seed=3)
    grid = np.linspace(0.0, 72.0 * max(frob / math.sqrt(72.0), spec_norm), 12)
    report = cc.monte_carlo_tail_check(
        sampler, statistic, lambda e: cc.gaussian_hw_tail(e, frob, spec_norm), grid, 20_000, 5
    )
    assert not report.flagged
    assert len(report.rows) == 12


def test_monte_carlo_zero_statistic():
    report = cc.monte_carlo_tail_check(
        lambda rng, count: rng.standard_normal((count, 2)),
        lambda batch: np.zeros(batch.shape[0]),
        lambda e: 1.0,
        [0.1, 1.0, 10.0],
        10_000,
        7,
    )
    assert all(row.empirical == 0.0 for row in report.rows)


def test_monte_carlo_flags_a_broken_bound():
    # a bound that is too small by construction must be flagged
    sampler, statistic, frob, spec_norm = _gaussian_quadform_setup(4, seed=11)
    report = cc.monte_carlo_tail_check(
        sampler, statistic, lambda e: 1e-6, np.array([0.1]), 10_000, 9
    )
    assert report.flagged


def test_monte_carlo_preconditions():
    with pytest.raises(ValueError):
        cc.monte_carlo_tail_check(
            lambda rng, count: rng.standard_normal(count),
            lambda batch: batch,
            lambda e: 1.0,
            [1.0],
            10,
            0,
        )
    with pytest.raises(ValueError):
        cc.monte_carlo_tail_check(
            lambda rng, count: rng.standard_normal(count),
            lambda batch: np.full(batch.shape[0], np.nan),
            lambda e: 1.0,
            [1.0],
            10_000,
            0,
        )
