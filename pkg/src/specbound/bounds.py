"""Finite-sample error certificates for quadratic-form spectral estimators.

Two certificate styles are provided.  Condition checks answer "does the
sufficient condition for error at most eps (probability at least 1 - delta)
hold for this estimator?"; bound evaluators invert those conditions into
numeric high-probability error bounds.  Concentration conditions compare the
reciprocal of a norm envelope against the product of an accuracy demand and a
confidence demand; bias conditions ask the diagonal sums to stay near one out
to a covariance-tail cutoff lag.  Estimator-specific checks instantiate those
conditions on the closed forms of the windowed-autocovariance, block-averaged,
and tapered-segment estimators; for the raw periodograms only the bias
condition is attainable.

Infeasible or unavailable certificates are returned as structured results,
never raised, so callers can tabulate feasibility frontiers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import estimators
from .constants import (
    COVER_BASE,
    FREQUENCY_COVER_FACTOR,
    GAUSSIAN,
    BoundConstants,
    NoiseAssumption,
    constants_for,
    sub_gaussian,
)
from .quadform import BiasCoefficients, QuadraticForm, bias_coefficients, diagonal_profile

__all__ = [
    "BartlettSelection",
    "BoundContext",
    "Certificate",
    "CONDITION_PARTS",
    "GAUSSIAN",
    "NoiseAssumption",
    "accuracy_factor",
    "bartlett_bias_closed_form",
    "check_conditions",
    "check_estimator_conditions",
    "confidence_factor",
    "covariance_tail",
    "data_driven_error_bound",
    "data_driven_factor",
    "envelope_from_form",
    "geometric_bias_bound",
    "optimize_bartlett_m",
    "pointwise_error_bound",
    "sub_gaussian",
    "sup_confidence_factor",
    "tail_cutoff_lag",
    "worst_case_error_bound",
]

CONDITION_PARTS = ("pointwise", "worst_case", "bias", "pointwise_total", "worst_total")

# slack for testing b[k] in [0, 1]: closed forms and diagonal sums agree only
# to rounding
_RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class BoundContext:
    """Process-side inputs shared by all certificates.

    ``decay`` is an optional (gamma, rho) envelope with ||R[k]|| <= gamma *
    rho^|k|; ``model`` optionally supplies exact covariance tail sums for the
    cutoff-lag search (the envelope is used otherwise).
    """

    assumption: NoiseAssumption
    phi_inf: float
    r1_norm: float
    channels: int
    decay: tuple[float, float] | None = None
    model: object = None

    def __post_init__(self):
        if not (np.isfinite(self.phi_inf) and self.phi_inf > 0.0):
            raise ValueError("phi_inf must be positive and finite")
        if not (np.isfinite(self.r1_norm) and self.r1_norm > 0.0):
            raise ValueError("r1_norm must be positive and finite")
        if self.channels < 1:
            raise ValueError("channel count must be positive")
        if self.decay is not None:
            gamma, rho = self.decay
            if not gamma > 0.0 or not 0.0 <= rho < 1.0:
                raise ValueError("decay pair must satisfy gamma > 0 and rho in [0, 1)")
            object.__setattr__(self, "decay", (float(gamma), float(rho)))
            if self.model is not None and hasattr(self.model, "autocov"):
                # the envelope must dominate the attached model's covariances
                for lag in range(65):
                    norm = float(np.linalg.norm(self.model.autocov(lag), 2))
                    if norm > gamma * rho ** lag + 1e-9:
                        raise ValueError(
                            f"decay envelope fails against the model at lag {lag}"
                        )

    @property
    def constants(self) -> BoundConstants:
        return constants_for(self.assumption)

    @classmethod
    def from_model(cls, model, assumption: NoiseAssumption) -> "BoundContext":
        decay = model.decay() if hasattr(model, "decay") else None
        return cls(
            assumption,
            float(model.phi_inf()),
            float(model.r1_norm()),
            int(model.channels),
            decay,
            model,
        )


def accuracy_factor(eps: float, ctx: BoundContext) -> float:
    """Demand placed on the reciprocal norm envelope by the accuracy target eps."""
    if not eps > 0.0:
        raise ValueError("accuracy target must be positive")
    scale = ctx.constants.scale
    phi = ctx.phi_inf
    return max(scale ** 4 * phi ** 2 / eps ** 2, scale ** 2 * phi / eps)


def confidence_factor(delta: float, ctx: BoundContext) -> float:
    """Demand placed on the reciprocal norm envelope by the failure budget delta."""
    if not 0.0 < delta < 1.0:
        raise ValueError("failure probability must lie in (0, 1)")
    consts = ctx.constants
    return math.log(COVER_BASE ** (2 * ctx.channels) * consts.multiplier / delta) / consts.rate


def sup_confidence_factor(truncation, delta: float, ctx: BoundContext) -> float:
    """Confidence demand for bounds uniform over frequency (adds the grid-cover term)."""
    if not truncation >= 1:
        raise ValueError("truncation width must be at least one")
    return math.log(FREQUENCY_COVER_FACTOR * float(truncation) ** 2) + confidence_factor(delta / 2.0, ctx)


def covariance_tail(ctx: BoundContext, lag: int) -> float:
    """Upper bound on the summed covariance norms over |k| >= lag.

    Exact when the context carries a model with an analytic tail; otherwise
    derived from the decay envelope.
    """
    if ctx.model is not None and hasattr(ctx.model, "autocov_tail"):
        return float(ctx.model.autocov_tail(lag))
    if lag <= 0:
        return ctx.r1_norm
    if ctx.decay is None:
        raise ValueError("context carries neither a model tail nor a decay envelope")
    gamma, rho = ctx.decay
    return 2.0 * gamma * rho ** lag / (1.0 - rho)


def tail_cutoff_lag(eps: float, ctx: BoundContext, max_lag: int = 1_000_000) -> int:
    """Smallest lag whose covariance tail drops to eps / 2 (nonincreasing in eps)."""
    if not eps > 0.0:
        raise ValueError("accuracy target must be positive")
    target = eps / 2.0
    lag = 0
    while covariance_tail(ctx, lag) > target:
        lag += 1
        if lag > max_lag:
            raise ValueError("covariance tail does not reach eps / 2 within the lag budget")
    return lag


@dataclass(frozen=True)
class Certificate:
    """One machine-checked statement: a condition verdict or a bound value.

    ``available`` is False when the requested certificate does not exist for
    the inputs (periodogram concentration, a data-driven factor of one or
    more); no exception is raised in that case.
    """

    statement: str
    available: bool = True
    holds: bool | None = None
    value: float | None = None
    epsilon: float | None = None
    delta: float | None = None
    inputs: tuple = ()
    note: str = ""


def _inputs(**kwargs) -> tuple:
    return tuple(kwargs.items())


def envelope_from_form(form: QuadraticForm) -> float:
    """Envelope over ||A||_2, ||A||_F^2 and every per-diagonal norm pair."""
    g = max(form.spectral_norm, form.frobenius_norm ** 2)
    for offset in range(form.size):
        profile = diagonal_profile(form, offset)
        g = max(g, profile.sup_norm, profile.l2_norm ** 2)
    return g


def _ensure_bias(bias) -> BiasCoefficients:
    if isinstance(bias, QuadraticForm):
        return bias_coefficients(bias)
    if isinstance(bias, BiasCoefficients):
        return bias
    raise TypeError("expected BiasCoefficients or a QuadraticForm")


def check_conditions(
    part: str,
    eps: float,
    delta: float,
    ctx: BoundContext,
    *,
    form: QuadraticForm | None = None,
    xi: float | None = None,
    envelope: float | None = None,
    truncation: int | None = None,
    bias=None,
) -> Certificate:
    """Verdict for one sufficient error condition of the general framework.

    Parts: ``pointwise`` (concentration at a single frequency, needs ``xi`` or
    the dense form), ``worst_case`` (concentration uniform over frequency,
    needs ``envelope``/``truncation`` or the dense form), ``bias`` (diagonal
    sums close to one out to the tail cutoff), and the conjunctions
    ``pointwise_total``/``worst_total`` whose conclusions hold at accuracy
    2 * eps with probability 1 - delta.
    """
    if part not in CONDITION_PARTS:
        raise ValueError(f"unknown condition part {part!r}")
    if part in ("pointwise_total", "worst_total"):
        base = "pointwise" if part == "pointwise_total" else "worst_case"
        first = check_conditions(
            base, eps, delta, ctx, form=form, xi=xi, envelope=envelope, truncation=truncation
        )
        second = check_conditions("bias", eps, delta, ctx, form=form, bias=bias)
        return Certificate(
            f"{part}_condition",
            holds=bool(first.holds and second.holds),
            epsilon=eps,
            delta=delta,
            inputs=_inputs(condition_epsilon=eps, conclusion_epsilon=2.0 * eps),
        )
    if part == "pointwise":
        if xi is None:
            if form is None:
                raise ValueError("pointwise check needs xi or the dense form")
            xi = max(form.spectral_norm, form.frobenius_norm ** 2)
        demand = accuracy_factor(eps, ctx) * confidence_factor(delta, ctx)
        return Certificate(
            "pointwise_condition",
            holds=bool(1.0 / xi >= demand),
            epsilon=eps,
            delta=delta,
            inputs=_inputs(xi=xi, demand=demand),
        )
    if part == "worst_case":
        if envelope is None or truncation is None:
            if form is None:
                raise ValueError("worst-case check needs envelope and truncation or the dense form")
            envelope = envelope_from_form(form)
            truncation = form.truncation_width
        demand = accuracy_factor(eps / 2.0, ctx) * sup_confidence_factor(truncation, delta, ctx)
        return Certificate(
            "worst_case_condition",
            holds=bool(1.0 / envelope >= demand),
            epsilon=eps,
            delta=delta,
            inputs=_inputs(envelope=envelope, truncation=truncation, demand=demand),
        )
    # bias
    if bias is None:
        if form is None:
            raise ValueError("bias check needs the diagonal sums or the dense form")
        bias = bias_coefficients(form)
    coeffs = _ensure_bias(bias)
    cutoff = tail_cutoff_lag(eps, ctx)
    floor = 1.0 - eps / (2.0 * ctx.r1_norm)
    in_range = bool(
        np.all(coeffs.values >= -_RANGE_SLACK) and np.all(coeffs.values <= 1.0 + _RANGE_SLACK)
    )
    near_one = all(coeffs.at(k) >= floor for k in range(-(cutoff - 1), cutoff)) if cutoff > 0 else True
    return Certificate(
        "bias_condition",
        holds=in_range and near_one,
        epsilon=eps,
        delta=delta,
        inputs=_inputs(cutoff=cutoff, floor=floor),
    )


def pointwise_error_bound(xi: float, delta: float, ctx: BoundContext) -> Certificate:
    """Deviation bound at a single frequency holding with probability 1 - delta."""
    if not xi > 0.0:
        raise ValueError("norm envelope must be positive")
    level = xi * confidence_factor(delta, ctx)
    value = ctx.constants.scale ** 2 * ctx.phi_inf * max(level, math.sqrt(level))
    return Certificate("pointwise_bound", value=value, delta=delta, inputs=_inputs(xi=xi))


def worst_case_error_bound(envelope: float, truncation, delta: float, ctx: BoundContext) -> Certificate:
    """Deviation bound uniform over frequency holding with probability 1 - delta."""
    if not envelope > 0.0:
        raise ValueError("norm envelope must be positive")
    level = envelope * sup_confidence_factor(truncation, delta, ctx)
    value = 2.0 * ctx.constants.scale ** 2 * ctx.phi_inf * max(level, math.sqrt(level))
    return Certificate(
        "worst_case_bound",
        value=value,
        delta=delta,
        inputs=_inputs(envelope=envelope, truncation=truncation),
    )


def geometric_bias_bound(bias, truncation: int, gamma: float, rho: float) -> Certificate:
    """Sure bias bound when ||R[k]|| <= gamma rho^|k| and b vanishes beyond ``truncation``."""
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    if not gamma > 0.0:
        raise ValueError("gamma must be positive")
    truncation = int(truncation)
    if truncation < 1:
        raise ValueError("truncation width must be at least one")
    coeffs = _ensure_bias(bias)
    outside = np.abs(coeffs.offsets) >= truncation
    if np.any(coeffs.values[outside] != 0.0):
        raise ValueError("diagonal sums must vanish beyond the truncation width")
    lags = np.arange(-(truncation - 1), truncation)
    body = sum(abs(1.0 - coeffs.at(k)) * rho ** abs(k) for k in lags)
    value = gamma * body + 2.0 * gamma * rho ** truncation / (1.0 - rho)
    return Certificate(
        "bias_bound_geometric",
        value=float(value),
        inputs=_inputs(truncation=truncation, gamma=gamma, rho=rho),
    )


def data_driven_factor(envelope: float, truncation, delta: float, ctx: BoundContext) -> float:
    """The multiplier of the self-referential worst-case bound (worst bound / phi_inf)."""
    if not envelope > 0.0:
        raise ValueError("norm envelope must be positive")
    level = envelope * sup_confidence_factor(truncation, delta, ctx)
    return 2.0 * ctx.constants.scale ** 2 * max(level, math.sqrt(level))


def data_driven_error_bound(a: float, bias_bound: float, estimate_sup: float) -> Certificate:
    """Total worst-case bound from the observed estimate when the true sup is unknown.

    Returns an unavailable certificate when the concentration factor reaches
    one, in which case the self-referential bound cannot be closed.
    """
    if a < 0.0 or bias_bound < 0.0 or estimate_sup < 0.0:
        raise ValueError("inputs must be nonnegative")
    if a >= 1.0:
        return Certificate(
            "data_driven_bound",
            available=False,
            note="concentration factor is at least one; no certificate",
            inputs=_inputs(a=a),
        )
    value = (a * estimate_sup + bias_bound) / (1.0 - a)
    return Certificate(
        "data_driven_bound",
        value=value,
        inputs=_inputs(a=a, bias_bound=bias_bound, estimate_sup=estimate_sup),
    )


def _family_name(spec) -> str:
    if isinstance(spec, estimators.BiasedPeriodogram):
        return "biased_periodogram"
    if isinstance(spec, estimators.UnbiasedPeriodogram):
        return "unbiased_periodogram"
    if isinstance(spec, estimators.BlackmanTukey):
        return "blackman_tukey"
    if isinstance(spec, estimators.Bartlett):
        return "bartlett"
    if isinstance(spec, estimators.Welch):
        return "welch"
    raise TypeError(f"unknown estimator spec {type(spec).__name__}")


def check_estimator_conditions(
    spec, num_samples: int, part: str, eps: float, delta: float, ctx: BoundContext
) -> Certificate:
    """Estimator-specific sufficient conditions on the closed-form quantities.

    For the periodogram variants only the bias condition is attainable (their
    norm envelope never drops below one); concentration parts come back
    unavailable.
    """
    if part not in CONDITION_PARTS:
        raise ValueError(f"unknown condition part {part!r}")
    n = int(num_samples)
    family = _family_name(spec)
    statement = f"{family}.{part}_condition"
    if part in ("pointwise_total", "worst_total"):
        base = "pointwise" if part == "pointwise_total" else "worst_case"
        first = check_estimator_conditions(spec, n, base, eps, delta, ctx)
        second = check_estimator_conditions(spec, n, "bias", eps, delta, ctx)
        if not (first.available and second.available):
            return Certificate(statement, available=False, epsilon=eps, delta=delta, note=first.note or second.note)
        return Certificate(
            statement,
            holds=bool(first.holds and second.holds),
            epsilon=eps,
            delta=delta,
            inputs=_inputs(condition_epsilon=eps, conclusion_epsilon=2.0 * eps),
        )
    if isinstance(spec, estimators.PERIODOGRAM_SPECS):
        if part in ("pointwise", "worst_case"):
            return Certificate(
                statement,
                available=False,
                epsilon=eps,
                delta=delta,
                note="periodogram norm envelope is at least one",
            )
        cutoff = tail_cutoff_lag(eps, ctx)
        if isinstance(spec, estimators.BiasedPeriodogram):
            holds = n >= 2.0 * cutoff * ctx.r1_norm / eps
        else:
            holds = n >= cutoff
        return Certificate(statement, holds=bool(holds), epsilon=eps, delta=delta, inputs=_inputs(cutoff=cutoff))
    params = estimators.certificate_params(spec, n)
    if part == "pointwise":
        demand = accuracy_factor(eps, ctx) * confidence_factor(delta, ctx)
        holds = 1.0 / params.envelope >= demand
        return Certificate(
            statement,
            holds=bool(holds),
            epsilon=eps,
            delta=delta,
            inputs=_inputs(envelope=params.envelope, demand=demand),
        )
    if part == "worst_case":
        demand = accuracy_factor(eps / 2.0, ctx) * sup_confidence_factor(params.truncation, delta, ctx)
        holds = 1.0 / params.envelope >= demand
        return Certificate(
            statement,
            holds=bool(holds),
            epsilon=eps,
            delta=delta,
            inputs=_inputs(envelope=params.envelope, truncation=params.truncation, demand=demand),
        )
    # estimator-specific bias conditions
    cutoff = tail_cutoff_lag(eps, ctx)
    floor = 1.0 - eps / (2.0 * ctx.r1_norm)
    if isinstance(spec, estimators.BlackmanTukey):
        m = spec.half_width
        weights = spec.weights()
        holds = m >= cutoff and n >= 2.0 * cutoff * ctx.r1_norm / eps
        for k in range(min(cutoff, m)):
            if weights[k + m - 1] < floor / (1.0 - k / n):
                holds = False
                break
        rest = np.abs(np.arange(-(m - 1), m)) >= cutoff
        if np.any(weights[rest] < -_RANGE_SLACK) or np.any(weights[rest] > 1.0 + _RANGE_SLACK):
            holds = False
    elif isinstance(spec, estimators.Bartlett):
        # lag-wise form of the block-average condition: every diagonal sum
        # 1 - |k|/M out to the cutoff stays above the floor (the coarser
        # closed-form demand M >= 2 * cutoff * r1 / eps implies this)
        m = spec.block_length
        holds = all(
            (1.0 - k / m if k < m else 0.0) >= floor for k in range(cutoff)
        )
    else:
        m = spec.segment_length
        taper = spec.taper_values()
        correlation = np.correlate(taper, taper, "full") / float(taper @ taper)
        holds = m >= cutoff
        for k in range(min(cutoff, m)):
            if correlation[k + m - 1] < floor:
                holds = False
                break
    return Certificate(
        statement,
        holds=bool(holds),
        epsilon=eps,
        delta=delta,
        inputs=_inputs(cutoff=cutoff, floor=floor),
    )


def bartlett_bias_closed_form(gamma: float, rho: float, block_length) -> float:
    """Explicit geometric-decay bias bound for the block-averaged estimator."""
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    if not gamma > 0.0:
        raise ValueError("gamma must be positive")
    m = float(block_length)
    if not m >= 1.0:
        raise ValueError("block length must be at least one")
    lead = 2.0 * gamma * rho / ((1.0 - rho) ** 2 * m)
    tail = 2.0 * gamma * (rho ** 2 / (1.0 - rho) ** 2 + 1.0 / (1.0 - rho)) * rho ** m
    return lead + tail


@dataclass(frozen=True)
class BartlettSelection:
    """Chosen block length and the total (concentration + bias) bound it attains."""

    block_length: float
    bound: float
    divisor_constrained: bool


def _divisors(n: int) -> list[int]:
    out = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return sorted(out)


def optimize_bartlett_m(
    num_samples: int, delta: float, ctx: BoundContext, divisors_only: bool = True
) -> BartlettSelection:
    """Pick the block length minimizing concentration plus closed-form bias.

    With ``divisors_only`` the search is exhaustive over the divisors of the
    sample count, ties broken toward the smaller block; otherwise the block
    length is optimized as a real number in [1, num_samples] (used to study
    how the optimum scales with the sample count).
    """
    if ctx.decay is None:
        raise ValueError("optimizer needs a decay envelope on the context")
    gamma, rho = ctx.decay
    n = int(num_samples)
    if n < 1:
        raise ValueError("sample count must be positive")

    def total(m: float) -> float:
        concentration = worst_case_error_bound(m / n, m, delta, ctx).value
        return concentration + bartlett_bias_closed_form(gamma, rho, m)

    if divisors_only:
        best_m, best_value = 1, total(1.0)
        for m in _divisors(n)[1:]:
            value = total(float(m))
            if value < best_value:
                best_m, best_value = m, value
        return BartlettSelection(best_m, best_value, True)
    grid = np.geomspace(1.0, n, 256)
    coarse = float(grid[np.argmin([total(m) for m in grid])])
    low, high = max(1.0, coarse / 2.0), min(float(n), coarse * 2.0)
    candidates = [1.0, coarse]
    if high > low:
        result = minimize_scalar(total, bounds=(low, high), method="bounded", options={"xatol": 1e-6})
        candidates.append(float(result.x))
    best = min(candidates, key=total)
    return BartlettSelection(best, total(best), False)
