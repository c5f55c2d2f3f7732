"""Classical spectrum estimators expressed through their quadratic forms.

Four families are covered: raw periodograms (biased and unbiased
autocovariance transforms), windowed-autocovariance estimates (Blackman-Tukey,
banded Toeplitz coefficient matrix), block-averaged periodograms (Bartlett,
block-diagonal matrix), and overlapping tapered segment averages (Welch, a sum
of shifted rank-one blocks).  Each family knows how to build its dense
coefficient matrix, its closed-form diagonal sums, the norm envelope and
truncation width feeding the worst-case certificates, and a fast evaluation
path via segment transforms that matches the generic quadratic form to
rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadform import (
    BiasCoefficients,
    DataMatrix,
    LagSequence,
    QuadraticForm,
    SpectralEstimate,
    two_sided_stack,
)

__all__ = [
    "Bartlett",
    "BiasedPeriodogram",
    "BlackmanTukey",
    "CertificateParams",
    "UnbiasedPeriodogram",
    "WINDOW_KINDS",
    "Welch",
    "biased_acs",
    "build_matrix",
    "certificate_params",
    "closed_form_bias",
    "evaluate_fast",
    "lag_window",
    "taper_window",
    "unbiased_acs",
]

WINDOW_KINDS = ("rectangular", "triangular", "hann", "hamming", "blackman")


def taper_window(kind: str, length: int) -> np.ndarray:
    """Symmetric data taper of the named kind on points 0..length-1.

    All named kinds take values in [0, 1] and are symmetric about the
    midpoint; a length of one degenerates to the single weight 1.
    """
    if length < 1:
        raise ValueError("window length must be positive")
    if kind not in WINDOW_KINDS:
        raise ValueError(f"unknown window kind {kind!r}")
    if kind == "rectangular" or length == 1:
        return np.ones(length)
    k = np.arange(length)
    x = 2.0 * np.pi * k / (length - 1)
    if kind == "triangular":
        values = 1.0 - np.abs(2.0 * k - (length - 1)) / (length - 1)
    elif kind == "hann":
        values = 0.5 - 0.5 * np.cos(x)
    elif kind == "hamming":
        values = 0.54 - 0.46 * np.cos(x)
    else:
        values = 0.42 - 0.5 * np.cos(x) + 0.08 * np.cos(2.0 * x)
    # rounding can leave values a few ulp outside [0, 1]
    return np.clip(values, 0.0, 1.0)


def lag_window(kind: str, half_width: int) -> np.ndarray:
    """Symmetric lag weights w[k] for |k| < half_width, stored at index k + half_width - 1.

    Same shapes as the tapers, re-centered so the peak weight sits at lag 0.
    """
    return taper_window(kind, 2 * half_width - 1)


@dataclass(frozen=True)
class BiasedPeriodogram:
    """Transform of the biased autocovariance estimate; coefficient matrix ones/N."""


@dataclass(frozen=True)
class UnbiasedPeriodogram:
    """Transform of the unbiased autocovariance estimate; Toeplitz entries 1/(N-|k|)."""


@dataclass(frozen=True)
class BlackmanTukey:
    """Windowed autocovariance estimator with lag weights cut off at ``half_width``.

    ``window`` is a named kind or an explicit symmetric weight vector of
    length 2*half_width - 1 (symmetry is required for a symmetric coefficient
    matrix).
    """

    half_width: int
    window: object = "rectangular"

    def __post_init__(self):
        if self.half_width < 1:
            raise ValueError("half_width must be positive")

    def weights(self) -> np.ndarray:
        if isinstance(self.window, str):
            return lag_window(self.window, self.half_width)
        values = np.asarray(self.window, dtype=float)
        expected = 2 * self.half_width - 1
        if values.shape != (expected,):
            raise ValueError(f"custom lag window must have length {expected}")
        if not np.all(np.isfinite(values)):
            raise ValueError("lag window contains non-finite entries")
        if not np.array_equal(values, values[::-1]):
            raise ValueError("lag window must satisfy w[k] = w[-k]")
        return values


@dataclass(frozen=True)
class Bartlett:
    """Average of plain periodograms over contiguous non-overlapping blocks."""

    block_length: int

    def __post_init__(self):
        if self.block_length < 1:
            raise ValueError("block_length must be positive")

    def blocks(self, num_samples: int) -> int:
        if num_samples < 1 or num_samples % self.block_length:
            raise ValueError("sample count must be a positive multiple of the block length")
        return num_samples // self.block_length


@dataclass(frozen=True)
class Welch:
    """Average of tapered periodograms over segments advanced by ``hop``.

    The taper is normalized to unit Euclidean norm internally; callers may
    pass unnormalized weights.
    """

    segment_length: int
    hop: int
    taper: object = "hann"

    def __post_init__(self):
        if self.segment_length < 1 or self.hop < 1:
            raise ValueError("segment_length and hop must be positive")

    def taper_values(self) -> np.ndarray:
        if isinstance(self.taper, str):
            values = taper_window(self.taper, self.segment_length)
        else:
            values = np.asarray(self.taper, dtype=float)
            if values.shape != (self.segment_length,):
                raise ValueError(f"custom taper must have length {self.segment_length}")
        if not np.all(np.isfinite(values)) or not np.linalg.norm(values) > 0.0:
            raise ValueError("taper must be finite and non-zero")
        return values

    def segments(self, num_samples: int) -> int:
        leftover = num_samples - self.segment_length
        if leftover < 0 or leftover % self.hop:
            raise ValueError(
                "sample count must equal (segments - 1) * hop + segment_length"
            )
        return leftover // self.hop + 1


PERIODOGRAM_SPECS = (BiasedPeriodogram, UnbiasedPeriodogram)


def build_matrix(spec, num_samples: int) -> QuadraticForm:
    """Dense coefficient matrix of the estimator (the generic-path representation)."""
    n = int(num_samples)
    if n < 1:
        raise ValueError("sample count must be positive")
    if isinstance(spec, BiasedPeriodogram):
        matrix = np.full((n, n), 1.0 / n)
    elif isinstance(spec, UnbiasedPeriodogram):
        lags = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
        matrix = 1.0 / (n - lags)
    elif isinstance(spec, BlackmanTukey):
        m = spec.half_width
        if m > n:
            raise ValueError("lag cutoff cannot exceed the sample count")
        wide = np.zeros(2 * n - 1)
        wide[n - m : n + m - 1] = spec.weights()
        diff = np.subtract.outer(np.arange(n), np.arange(n))
        matrix = wide[diff + n - 1] / n
    elif isinstance(spec, Bartlett):
        m = spec.block_length
        spec.blocks(n)
        matrix = np.zeros((n, n))
        for start in range(0, n, m):
            matrix[start : start + m, start : start + m] = 1.0 / n
    elif isinstance(spec, Welch):
        segments = spec.segments(n)
        taper = spec.taper_values()
        block = np.outer(taper, taper)
        matrix = np.zeros((n, n))
        for i in range(segments):
            start = i * spec.hop
            matrix[start : start + spec.segment_length, start : start + spec.segment_length] += block
        matrix /= segments * float(taper @ taper)
    else:
        raise TypeError(f"unknown estimator spec {type(spec).__name__}")
    return QuadraticForm(matrix)


def closed_form_bias(spec, num_samples: int) -> BiasCoefficients:
    """Per-family closed form for the diagonal sums b[k], padded to |k| < num_samples.

    Equals the brute-force diagonal sums of the dense coefficient matrix to
    rounding error.
    """
    n = int(num_samples)
    if n < 1:
        raise ValueError("sample count must be positive")
    lags = np.arange(-(n - 1), n)
    size = np.abs(lags)
    if isinstance(spec, BiasedPeriodogram):
        values = 1.0 - size / n
    elif isinstance(spec, UnbiasedPeriodogram):
        values = np.ones(2 * n - 1)
    elif isinstance(spec, BlackmanTukey):
        m = spec.half_width
        if m > n:
            raise ValueError("lag cutoff cannot exceed the sample count")
        weights = spec.weights()
        values = np.zeros(2 * n - 1)
        inner = size < m
        values[inner] = (n - size[inner]) * weights[lags[inner] + m - 1] / n
    elif isinstance(spec, Bartlett):
        m = spec.block_length
        spec.blocks(n)
        values = np.where(size < m, 1.0 - size / m, 0.0)
    elif isinstance(spec, Welch):
        spec.segments(n)
        taper = spec.taper_values()
        m = spec.segment_length
        correlation = np.correlate(taper, taper, "full") / float(taper @ taper)
        values = np.zeros(2 * n - 1)
        inner = size < m
        values[inner] = correlation[lags[inner] + m - 1]
    else:
        raise TypeError(f"unknown estimator spec {type(spec).__name__}")
    return BiasCoefficients(values)


@dataclass(frozen=True)
class CertificateParams:
    """Envelope over all coefficient norms plus the diagonal truncation width."""

    envelope: float
    truncation: int


def certificate_params(spec, num_samples: int):
    """Closed-form (envelope, truncation) feeding the worst-case certificates.

    Returns None for the periodogram variants: their norm envelope never drops
    below one, so no concentration certificate exists.
    """
    n = int(num_samples)
    if isinstance(spec, PERIODOGRAM_SPECS):
        return None
    if isinstance(spec, BlackmanTukey):
        if spec.half_width > n:
            raise ValueError("lag cutoff cannot exceed the sample count")
        return CertificateParams((2 * spec.half_width - 1) / n, spec.half_width)
    if isinstance(spec, Bartlett):
        spec.blocks(n)
        return CertificateParams(spec.block_length / n, spec.block_length)
    if isinstance(spec, Welch):
        segments = spec.segments(n)
        envelope = (1.0 + 2.0 * spec.segment_length / spec.hop) / segments
        return CertificateParams(envelope, spec.segment_length)
    raise TypeError(f"unknown estimator spec {type(spec).__name__}")


def _acs_head(data: DataMatrix, max_lag: int, biased: bool) -> np.ndarray:
    """Lag products for k = 0..max_lag, divided by N (biased) or N - k."""
    y = data.values
    n, total = y.shape
    out = np.empty((max_lag + 1, n, n))
    for k in range(max_lag + 1):
        out[k] = (y[:, k:] @ y[:, : total - k].T) / (total if biased else total - k)
    return out


def biased_acs(data: DataMatrix) -> LagSequence:
    """Autocovariance estimate with divisor N, the transform partner of the periodogram."""
    head = _acs_head(data, data.samples - 1, biased=True)
    return LagSequence(two_sided_stack(head))


def unbiased_acs(data: DataMatrix) -> LagSequence:
    """Autocovariance estimate with divisor N - |k| (unbiased at every computed lag)."""
    head = _acs_head(data, data.samples - 1, biased=False)
    return LagSequence(two_sided_stack(head))


def _lag_transform(stack: np.ndarray, offsets: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    phases = np.exp(-2j * np.pi * np.outer(freqs, offsets))
    return np.einsum("fk,kij->fij", phases, stack)


def evaluate_fast(spec, data: DataMatrix, frequencies) -> SpectralEstimate:
    """Structured evaluation over a grid: segment transforms or windowed autocovariance.

    Algebraically identical to ``evaluate_generic`` with the dense matrix;
    agreement holds to rounding error and is enforced by the test suite.
    """
    freqs = np.atleast_1d(np.asarray(frequencies, dtype=float))
    y = data.values
    n, total = y.shape
    if isinstance(spec, BiasedPeriodogram):
        phases = np.exp(-2j * np.pi * np.outer(np.arange(total), freqs))
        transform = y @ phases
        matrices = np.einsum("if,jf->fij", transform, transform.conj()) / total
    elif isinstance(spec, UnbiasedPeriodogram):
        seq = unbiased_acs(data)
        matrices = _lag_transform(seq.values, seq.offsets, freqs)
    elif isinstance(spec, BlackmanTukey):
        m = spec.half_width
        if m > total:
            raise ValueError("lag cutoff cannot exceed the sample count")
        stack = two_sided_stack(_acs_head(data, m - 1, biased=True))
        weighted = stack * spec.weights()[:, None, None]
        matrices = _lag_transform(weighted, np.arange(-(m - 1), m), freqs)
    elif isinstance(spec, Bartlett):
        m = spec.block_length
        blocks = spec.blocks(total)
        segments = y.reshape(n, blocks, m).transpose(1, 0, 2)
        phases = np.exp(-2j * np.pi * np.outer(np.arange(m), freqs))
        transform = segments @ phases
        matrices = np.einsum("lif,ljf->fij", transform, transform.conj()) / total
    elif isinstance(spec, Welch):
        segments = spec.segments(total)
        taper = spec.taper_values()
        taper = taper / np.linalg.norm(taper)
        m = spec.segment_length
        windows = np.stack([y[:, i * spec.hop : i * spec.hop + m] for i in range(segments)])
        phases = taper[:, None] * np.exp(-2j * np.pi * np.outer(np.arange(m), freqs))
        transform = windows @ phases
        matrices = np.einsum("lif,ljf->fij", transform, transform.conj()) / segments
    else:
        raise TypeError(f"unknown estimator spec {type(spec).__name__}")
    matrices = 0.5 * (matrices + matrices.conj().transpose(0, 2, 1))
    return SpectralEstimate(freqs, matrices)
