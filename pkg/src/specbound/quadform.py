"""Quadratic-form machinery shared by every spectral estimator in the package.

All estimators here evaluate, at a frequency ``s`` given in cycles per sample
on [-1/2, 1/2], the Hermitian matrix

    Y D(-s) A D(s) Y^T,    D(s) = diag(1, e^{j2 pi s}, ..., e^{j2 pi (N-1) s}),

for a real symmetric N x N coefficient matrix ``A``.  This module holds the
dense representation of ``A`` together with the derived quantities consumed by
the error certificates: the per-diagonal profiles d[k] (whose sup and
Euclidean norms are exactly the spectral and Frobenius norms of the
single-diagonal matrices B[k]), the diagonal sums b[k] that determine the
estimator mean, the generic evaluation path used as the correctness oracle for
the fast structured paths, and exact bias evaluation against analytic process
models.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "BiasCoefficients",
    "DataMatrix",
    "DiagonalProfile",
    "LagSequence",
    "QuadraticForm",
    "SpectralEstimate",
    "bias_coefficients",
    "diagonal_profile",
    "evaluate_generic",
    "evaluate_generic_grid",
    "exact_bias_sup",
    "expected_estimate",
    "frequency_grid",
    "hermitian_part",
    "hermitian_spectral_norms",
    "two_sided_stack",
]


def frequency_grid(points: int = 101, full_range: bool = False) -> np.ndarray:
    """Closed, linearly spaced grid of frequencies in cycles per sample.

    The default covers [0, 1/2]; with ``full_range`` the grid spans
    [-1/2, 1/2].  Endpoints are always included.
    """
    if points < 1:
        raise ValueError("frequency grid needs at least one point")
    if points == 1:
        return np.zeros(1)
    start = -0.5 if full_range else 0.0
    return np.linspace(start, 0.5, points)


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    """Average a square matrix with its conjugate transpose."""
    return 0.5 * (matrix + matrix.conj().T)


def hermitian_spectral_norms(matrices: np.ndarray) -> np.ndarray:
    """Spectral norms of a stack (..., n, n) of Hermitian matrices."""
    eigenvalues = np.linalg.eigvalsh(matrices)
    return np.abs(eigenvalues).max(axis=-1)


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """Real sample block with one row per channel and one column per sample."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.values, dtype=float))
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("data must form a non-empty two-dimensional array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("data contains non-finite entries")
        object.__setattr__(self, "values", _frozen_array(arr))

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def samples(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric coefficient matrix of a quadratic-form spectral estimator.

    The matrix is symmetrized on construction; rounding noise in upstream
    builders is the only asymmetry this ever removes.  Norms are computed
    lazily and cached; sizes stay at desk scale so a dense symmetric
    eigensolve is the stable choice for the spectral norm.
    """

    matrix: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.matrix, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError("coefficient matrix must be square and non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficient matrix contains non-finite entries")
        object.__setattr__(self, "matrix", _frozen_array(0.5 * (arr + arr.T)))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def diagonal(self, offset: int) -> np.ndarray:
        """Entries d[k] of the ``offset``-th diagonal (positive offsets below the main one)."""
        if abs(offset) >= self.size:
            raise ValueError(f"|offset| must be smaller than the size {self.size}")
        return np.diagonal(self.matrix, offset=-offset)

    @cached_property
    def spectral_norm(self) -> float:
        return float(np.abs(np.linalg.eigvalsh(self.matrix)).max())

    @cached_property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    @cached_property
    def truncation_width(self) -> int:
        """Smallest width beyond which every diagonal of the matrix vanishes."""
        for offset in range(self.size - 1, -1, -1):
            if np.any(self.diagonal(offset) != 0.0) or np.any(self.diagonal(-offset) != 0.0):
                return offset + 1
        return 0


@dataclass(frozen=True)
class DiagonalProfile:
    """One diagonal of a coefficient matrix together with its induced norms.

    Embedding ``entries`` back at ``offset`` in a zero matrix yields the
    single-diagonal matrix B[k]; its spectral norm is ``sup_norm`` and its
    Frobenius norm is ``l2_norm``, both readable off the entries directly.
    """

    offset: int
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(np.atleast_1d(self.entries)))

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.entries).max())

    @property
    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def embed(self, size: int) -> np.ndarray:
        """Dense B[k]: the entries placed on the ``offset`` diagonal of zeros."""
        length = self.entries.size
        if length != size - abs(self.offset):
            raise ValueError("profile length does not match the requested size")
        dense = np.zeros((size, size))
        idx = np.arange(length)
        if self.offset >= 0:
            dense[idx + self.offset, idx] = self.entries
        else:
            dense[idx, idx - self.offset] = self.entries
        return dense


def diagonal_profile(form: QuadraticForm, offset: int) -> DiagonalProfile:
    """Extract d[k] for the requested diagonal of ``form``."""
    return DiagonalProfile(offset, form.diagonal(offset))


@dataclass(frozen=True)
class BiasCoefficients:
    """Diagonal sums b[k] of a coefficient matrix, stored for |k| < half_width.

    Lag ``k`` lives at index ``k + half_width - 1``; the sequence is zero
    outside.  The estimator mean is sum_k e^{-j2 pi s k} b[k] R[k].
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.values, dtype=float))
        if arr.ndim != 1 or arr.size % 2 == 0:
            raise ValueError("lag-indexed values need an odd-length vector")
        object.__setattr__(self, "values", _frozen_array(arr))

    @property
    def half_width(self) -> int:
        return (self.values.size + 1) // 2

    @property
    def offsets(self) -> np.ndarray:
        h = self.half_width
        return np.arange(-(h - 1), h)

    def at(self, k: int) -> float:
        if abs(int(k)) >= self.half_width:
            return 0.0
        return float(self.values[int(k) + self.half_width - 1])


@dataclass(frozen=True)
class LagSequence:
    """Matrix-valued lag sequence (e.g. autocovariance estimates), |k| < half_width."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 3 or arr.shape[0] % 2 == 0 or arr.shape[1] != arr.shape[2]:
            raise ValueError("expected an odd-length stack of square matrices")
        object.__setattr__(self, "values", _frozen_array(arr))

    @property
    def half_width(self) -> int:
        return (self.values.shape[0] + 1) // 2

    @property
    def offsets(self) -> np.ndarray:
        h = self.half_width
        return np.arange(-(h - 1), h)

    def at(self, k: int) -> np.ndarray:
        if abs(int(k)) >= self.half_width:
            n = self.values.shape[1]
            return np.zeros((n, n))
        return self.values[int(k) + self.half_width - 1]


def two_sided_stack(head: np.ndarray) -> np.ndarray:
    """Extend a one-sided stack R[0..K] to lags -K..K using R[-k] = R[k]^T."""
    head = np.asarray(head)
    tail = head[1:][::-1].transpose(0, 2, 1)
    return np.concatenate([tail, head])


def bias_coefficients(form: QuadraticForm) -> BiasCoefficients:
    """Sum every diagonal of ``form``; equals 1^T d[k] at each lag."""
    n = form.size
    values = np.array([np.trace(form.matrix, offset=-k) for k in range(-(n - 1), n)])
    return BiasCoefficients(values)


def evaluate_generic(data: DataMatrix, form: QuadraticForm, frequency: float) -> np.ndarray:
    """Evaluate Y D(-s) A D(s) Y^T at one frequency, symmetrized to exact Hermitian.

    Runs in O(n N^2 + n^2 N) by rotating the data first; this dense path is
    the correctness oracle for the structured estimators.
    """
    if form.size != data.samples:
        raise ValueError("coefficient matrix size must match the sample count")
    phase = np.exp(-2j * np.pi * float(frequency) * np.arange(data.samples))
    rotated = data.values * phase
    return hermitian_part(rotated @ form.matrix @ rotated.conj().T)


@dataclass(frozen=True)
class SpectralEstimate:
    """Hermitian spectral matrices evaluated on a frequency grid."""

    frequencies: np.ndarray
    matrices: np.ndarray

    def __post_init__(self):
        freqs = _frozen_array(np.atleast_1d(self.frequencies))
        mats = np.array(self.matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[0] != freqs.size or mats.shape[1] != mats.shape[2]:
            raise ValueError("matrices must form a (grid, n, n) stack matching the frequencies")
        mats.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "matrices", mats)

    @property
    def channels(self) -> int:
        return self.matrices.shape[1]

    def sup_norm(self) -> float:
        """Largest spectral norm over the grid."""
        return float(hermitian_spectral_norms(self.matrices).max())


def evaluate_generic_grid(data: DataMatrix, form: QuadraticForm, frequencies) -> SpectralEstimate:
    """Generic quadratic-form evaluation over a whole grid."""
    freqs = np.atleast_1d(np.asarray(frequencies, dtype=float))
    matrices = np.stack([evaluate_generic(data, form, s) for s in freqs])
    return SpectralEstimate(freqs, matrices)


def _ensure_bias(bias) -> BiasCoefficients:
    if isinstance(bias, QuadraticForm):
        return bias_coefficients(bias)
    if isinstance(bias, BiasCoefficients):
        return bias
    raise TypeError("expected BiasCoefficients or a QuadraticForm")


def _two_sided_autocov(model, half_width: int) -> np.ndarray:
    if not hasattr(model, "autocov_stack"):
        raise TypeError("model does not expose an analytic autocovariance")
    head = np.asarray(model.autocov_stack(half_width - 1), dtype=float)
    return two_sided_stack(head)


def expected_estimate(bias, model, frequencies) -> np.ndarray:
    """Exact estimator mean sum_k e^{-j2 pi s k} b[k] R[k] on a grid, as (grid, n, n).

    Accepts either precomputed diagonal sums or the dense coefficient matrix.
    Serves as the exact-mean oracle in bias tests.
    """
    coeffs = _ensure_bias(bias)
    freqs = np.atleast_1d(np.asarray(frequencies, dtype=float))
    autocov = _two_sided_autocov(model, coeffs.half_width)
    phases = np.exp(-2j * np.pi * np.outer(freqs, coeffs.offsets))
    return np.einsum("fk,kij->fij", phases * coeffs.values, autocov)


def exact_bias_sup(bias, model, frequencies) -> float:
    """Worst-case bias upper bound, sharp up to the grid resolution.

    Evaluates sum_{|k| < H} e^{-j2 pi s k} (1 - b[k]) R[k] on the grid, takes
    the largest spectral norm, and adds the analytic remainder
    sum_{|l| >= H} ||R[l]||_2 supplied by the model, where H is the half-width
    of the diagonal sums.
    """
    coeffs = _ensure_bias(bias)
    freqs = np.atleast_1d(np.asarray(frequencies, dtype=float))
    autocov = _two_sided_autocov(model, coeffs.half_width)
    phases = np.exp(-2j * np.pi * np.outer(freqs, coeffs.offsets))
    finite = np.einsum("fk,kij->fij", phases * (1.0 - coeffs.values), autocov)
    finite = 0.5 * (finite + finite.conj().transpose(0, 2, 1))
    grid_sup = float(hermitian_spectral_norms(finite).max())
    return grid_sup + float(model.autocov_tail(coeffs.half_width))
