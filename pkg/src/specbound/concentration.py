"""Executable tail bounds for quadratic forms, plus a Monte Carlo verifier.

The bounds here are the concentration primitives the certificate engine is
built on: the explicit-constant Hanson-Wright tail for quadratic forms of
independent psi2-bounded coordinates, its sharper Gaussian specialization,
the generic subexponential tail, the numeric right-hand sides of the standard
sub-gaussian moment facts, and the tail for quadratic forms of an entire
stationary data matrix.  ``monte_carlo_tail_check`` confronts any of them
with simulation; since the bounds are proven, a flagged row indicates an
implementation bug, not a statistical fluke.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import COVER_BASE, GAUSSIAN_QUADFORM_RATE, HANSON_WRIGHT_RATE
from .streams import rng_stream

__all__ = [
    "SubExponentialSpec",
    "SubGaussianSpec",
    "TailCheckReport",
    "TailCheckRow",
    "data_matrix_tail",
    "gaussian_hw_tail",
    "hanson_wright_tail",
    "monte_carlo_tail_check",
    "subexp_tail",
    "subgaussian_fact",
]


@dataclass(frozen=True)
class SubGaussianSpec:
    """Sub-gaussian scale together with the psi2 bound the tail bounds consume.

    The default psi2 bound is the pipeline constant 2 * sigma (the sharper
    sqrt(8/3) * sigma is available through ``subgaussian_fact``); a custom
    bound may be supplied but can never exceed 2 * sigma.
    """

    sigma: float
    psi2_bound: float | None = None

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        bound = 2.0 * self.sigma if self.psi2_bound is None else float(self.psi2_bound)
        if bound < 0.0 or bound > 2.0 * self.sigma + 1e-12:
            raise ValueError("psi2 bound must lie in [0, 2 * sigma]")
        object.__setattr__(self, "psi2_bound", bound)


@dataclass(frozen=True)
class SubExponentialSpec:
    """(nu, alpha) pair of a subexponential tail exp(-min{t^2/nu^2, t/alpha} / 2)."""

    nu: float
    alpha_se: float

    def __post_init__(self):
        if self.nu < 0.0 or self.alpha_se < 0.0:
            raise ValueError("nu and alpha_se must be nonnegative")

    def tail(self, t: float) -> float:
        return subexp_tail(t, self.nu, self.alpha_se)


def _min_branch(eps: float, quad_denom: float, linear_denom: float) -> float:
    return min(eps * eps / quad_denom, eps / linear_denom)


def hanson_wright_tail(eps: float, psi2_bound: float, frobenius_norm: float, spectral_norm: float) -> float:
    """Upper tail of x'Ax - E[x'Ax] for independent psi2-bounded coordinates.

    Probabilities are capped at one; below the cap the bound is
    2 exp(-min{eps^2 / (b^4 F^2), eps / (b^2 S)} / 2048).
    """
    if eps < 0.0:
        raise ValueError("deviation must be nonnegative")
    if not (psi2_bound > 0.0 and frobenius_norm > 0.0 and spectral_norm > 0.0):
        raise ValueError("psi2 bound and norms must be positive")
    b2 = psi2_bound * psi2_bound
    exponent = HANSON_WRIGHT_RATE * _min_branch(eps, b2 * b2 * frobenius_norm ** 2, b2 * spectral_norm)
    return min(1.0, 2.0 * math.exp(-exponent))


def gaussian_hw_tail(eps: float, frobenius_norm: float, spectral_norm: float) -> float:
    """Sharper specialization of the quadratic-form tail for standard normal coordinates."""
    if eps < 0.0:
        raise ValueError("deviation must be nonnegative")
    if not (frobenius_norm > 0.0 and spectral_norm > 0.0):
        raise ValueError("norms must be positive")
    exponent = GAUSSIAN_QUADFORM_RATE * _min_branch(eps, frobenius_norm ** 2, spectral_norm)
    return min(1.0, math.exp(-exponent))


def subexp_tail(t: float, nu: float, alpha_se: float) -> float:
    """Upper tail exp(-min{t^2 / nu^2, t / alpha} / 2) of a (nu, alpha)-subexponential variable."""
    if t < 0.0 or nu < 0.0 or alpha_se < 0.0:
        raise ValueError("arguments must be nonnegative")
    if t == 0.0:
        return 1.0
    quad = math.inf if nu == 0.0 else t * t / (nu * nu)
    linear = math.inf if alpha_se == 0.0 else t / alpha_se
    if math.isinf(quad) and math.isinf(linear):
        return 0.0
    return math.exp(-0.5 * min(quad, linear))


def subgaussian_fact(name: str, **params) -> float:
    """Numeric right-hand sides of the standard psi2 / sub-gaussian facts.

    tail(t, b): 2 exp(-t^2 / b^2)
    even_moment(k, b): 2 b^(2k) k!
    mgf(lam, b): exp(4 lam^2 b^2)
    centered_square_moment(k, b): 2 (2 b^2)^k k!
    square_mgf(lam, b): exp((4 b^2)^2 lam^2), valid for |lam| <= 1 / (4 b^2)
    psi2_from_sigma(sigma): sqrt(8/3) sigma (always at most 2 sigma)
    variance(sigma): sigma^2
    """
    if name == "tail":
        t, b = float(params["t"]), float(params["b"])
        if t < 0.0 or b <= 0.0:
            raise ValueError("tail needs t >= 0 and b > 0")
        return 2.0 * math.exp(-t * t / (b * b))
    if name == "even_moment":
        k, b = int(params["k"]), float(params["b"])
        if k < 0 or b <= 0.0:
            raise ValueError("even_moment needs k >= 0 and b > 0")
        return 2.0 * b ** (2 * k) * math.factorial(k)
    if name == "mgf":
        lam, b = float(params["lam"]), float(params["b"])
        return math.exp(4.0 * lam * lam * b * b)
    if name == "centered_square_moment":
        k, b = int(params["k"]), float(params["b"])
        if k < 0 or b <= 0.0:
            raise ValueError("centered_square_moment needs k >= 0 and b > 0")
        return 2.0 * (2.0 * b * b) ** k * math.factorial(k)
    if name == "square_mgf":
        lam, b = float(params["lam"]), float(params["b"])
        if b <= 0.0:
            raise ValueError("square_mgf needs b > 0")
        if abs(lam) > 1.0 / (4.0 * b * b):
            raise ValueError("square_mgf is only valid for |lam| <= 1 / (4 b^2)")
        return math.exp((4.0 * b * b) ** 2 * lam * lam)
    if name == "psi2_from_sigma":
        sigma = float(params["sigma"])
        if sigma < 0.0:
            raise ValueError("psi2_from_sigma needs sigma >= 0")
        return math.sqrt(8.0 / 3.0) * sigma
    if name == "variance":
        sigma = float(params["sigma"])
        if sigma < 0.0:
            raise ValueError("variance needs sigma >= 0")
        return sigma * sigma
    raise ValueError(f"unknown fact {name!r}")


def data_matrix_tail(
    eps: float,
    spectral_norm: float,
    frobenius_norm: float,
    phi_inf: float,
    channels: int,
    constants,
) -> float:
    """Tail of ||Y J Y' - E||_2 for a stationary data matrix under a constants triple.

    ``constants`` carries (multiplier, rate, scale); setting this bound equal
    to delta and solving for the norms reproduces the pointwise sufficient
    condition of the certificate engine exactly.
    """
    if eps < 0.0:
        raise ValueError("deviation must be nonnegative")
    if not (spectral_norm > 0.0 and frobenius_norm > 0.0 and phi_inf > 0.0):
        raise ValueError("norms and phi_inf must be positive")
    scale2 = constants.scale ** 2
    exponent = constants.rate * _min_branch(
        eps, scale2 ** 2 * frobenius_norm ** 2 * phi_inf ** 2, scale2 * spectral_norm * phi_inf
    )
    return min(1.0, COVER_BASE ** (2 * int(channels)) * constants.multiplier * math.exp(-exponent))


@dataclass(frozen=True)
class TailCheckRow:
    eps: float
    empirical: float
    bound: float
    flagged: bool


@dataclass(frozen=True)
class TailCheckReport:
    """Per-deviation empirical exceedance frequencies vs the analytic bound."""

    rows: tuple
    trials: int

    @property
    def flagged(self) -> bool:
        return any(row.flagged for row in self.rows)


def monte_carlo_tail_check(sampler, statistic, bound_fn, eps_grid, trials: int, seed: int) -> TailCheckReport:
    """Empirical exceedance frequencies against an analytic tail bound.

    ``sampler(rng, count)`` draws a batch of inputs and ``statistic(batch)``
    maps them to one centered scalar per draw; ``bound_fn(eps)`` is the
    analytic tail.  A row is flagged when the empirical frequency exceeds the
    bound by more than three one-sided binomial standard errors; with a proven
    bound a flag indicates a bug.
    """
    trials = int(trials)
    if trials < 10_000:
        raise ValueError("tail check needs at least 10^4 trials")
    grid = np.atleast_1d(np.asarray(eps_grid, dtype=float))
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValueError("eps grid must be finite and non-empty")
    rng = rng_stream(seed)
    stats = np.asarray(statistic(sampler(rng, trials)), dtype=float)
    if stats.shape != (trials,) or not np.all(np.isfinite(stats)):
        raise ValueError("statistic must yield one finite value per trial")
    rows = []
    for eps in grid:
        empirical = float(np.mean(stats > eps))
        bound = float(min(1.0, max(0.0, bound_fn(float(eps)))))
        slack = 3.0 * math.sqrt(bound * (1.0 - bound) / trials)
        rows.append(TailCheckRow(float(eps), empirical, bound, empirical > bound + slack))
    return TailCheckReport(tuple(rows), trials)
