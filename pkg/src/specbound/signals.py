"""Analytic process models, exact spectra, decay certificates, and samplers.

Three stationary zero-mean model families back the validation studies:

* ``GeometricScalar`` - a scalar first-order recursion with autocovariance
  exactly rho^|k| and unit variance, driven by Gaussian or scaled-uniform
  noise;
* ``WhiteNoise`` - independent unit-variance channels;
* ``StateSpace`` - a stable multichannel system driven by standard normal
  vectors, with closed-form autocovariance via the stationary state
  covariance.

Models expose the exact autocovariance, the spectrum, its sup norm, the
summed covariance norm, an analytic tail bound, and a geometric decay pair
(gamma, rho) with ||R[k]||_2 <= gamma * rho^|k|.  Samplers draw from
counter-based streams keyed by (seed, path index) so every path is bitwise
reproducible independent of batching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.signal import lfilter

from .quadform import DataMatrix, hermitian_spectral_norms
from .streams import rng_stream

__all__ = [
    "DecayCertificate",
    "GeometricScalar",
    "NOISE_KINDS",
    "StateSpace",
    "UNIFORM_SIGMA",
    "WhiteNoise",
    "certify_decay",
    "exact_autocov",
    "grid_phi_inf",
    "phi_inf",
    "psd",
    "r1_norm",
    "r1_norm_bound",
    "sample_geometric",
    "sample_geometric_paths",
    "sample_state_space",
    "sample_state_space_paths",
    "sample_white",
    "sample_white_paths",
    "solve_discrete_lyapunov",
    "spectral_radius",
]

NOISE_KINDS = ("gaussian", "uniform")

# uniform noise on [-sqrt(3), sqrt(3)]: unit variance, sub-gaussian scale sqrt(3)
UNIFORM_HALF_WIDTH = math.sqrt(3.0)
UNIFORM_SIGMA = math.sqrt(3.0)


def spectral_radius(matrix) -> float:
    return float(np.abs(np.linalg.eigvals(np.asarray(matrix, dtype=float))).max())


def solve_discrete_lyapunov(transition, forcing, tol: float = 1e-12, max_doublings: int = 128) -> np.ndarray:
    """Solve X = T X T' + Q by fixed-point doubling (requires spectral radius of T < 1).

    Each pass squares the transition matrix, so convergence is quadratic and
    unconditional for stable T; the result is symmetrized.
    """
    x = np.array(forcing, dtype=float)
    t = np.array(transition, dtype=float)
    for _ in range(max_doublings):
        update = t @ x @ t.T
        fresh = x + update
        if np.linalg.norm(update) <= tol * max(np.linalg.norm(fresh), np.finfo(float).tiny):
            return 0.5 * (fresh + fresh.T)
        x = fresh
        t = t @ t
    raise ValueError("doubling iteration did not converge; transition matrix may be unstable")


def grid_phi_inf(model, points: int = 4096, safety: float = 1.01) -> float:
    """Grid maximum of the spectral norm of the model spectrum, inflated by ``safety``."""
    freqs = np.linspace(-0.5, 0.5, points)
    return safety * float(hermitian_spectral_norms(model.psd_grid(freqs)).max())


@dataclass(frozen=True)
class GeometricScalar:
    """Scalar process with autocovariance exactly rho^|k| and unit variance.

    Realized by the recursion y[k] = rho y[k-1] + sqrt(1 - rho^2) e[k] with
    unit-variance shocks; the gain makes the stated autocovariance exact.
    """

    rho: float

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")

    @property
    def channels(self) -> int:
        return 1

    def autocov(self, k: int) -> np.ndarray:
        return np.array([[self.rho ** abs(int(k))]])

    def autocov_stack(self, max_lag: int) -> np.ndarray:
        return (self.rho ** np.arange(max_lag + 1, dtype=float)).reshape(-1, 1, 1)

    def autocov_tail(self, lag: int) -> float:
        """Exact sum of |R[k]| over |k| >= lag."""
        if lag <= 0:
            return self.r1_norm()
        return 2.0 * self.rho ** lag / (1.0 - self.rho)

    def psd_grid(self, frequencies) -> np.ndarray:
        s = np.atleast_1d(np.asarray(frequencies, dtype=float))
        gain = np.abs(1.0 - self.rho * np.exp(-2j * np.pi * s)) ** 2
        return ((1.0 - self.rho ** 2) / gain).astype(complex).reshape(-1, 1, 1)

    def psd(self, frequency: float) -> np.ndarray:
        return self.psd_grid([frequency])[0]

    def phi_inf(self) -> float:
        # the spectrum peaks at frequency zero
        return (1.0 + self.rho) / (1.0 - self.rho)

    def r1_norm(self) -> float:
        return (1.0 + self.rho) / (1.0 - self.rho)

    def decay(self) -> tuple[float, float]:
        return (1.0, self.rho)


@dataclass(frozen=True)
class WhiteNoise:
    """Independent unit-variance channels: R[k] = delta[k] I and a flat unit spectrum."""

    channels: int = 1

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError("channel count must be positive")

    def autocov(self, k: int) -> np.ndarray:
        if int(k) == 0:
            return np.eye(self.channels)
        return np.zeros((self.channels, self.channels))

    def autocov_stack(self, max_lag: int) -> np.ndarray:
        out = np.zeros((max_lag + 1, self.channels, self.channels))
        out[0] = np.eye(self.channels)
        return out

    def autocov_tail(self, lag: int) -> float:
        return 1.0 if lag <= 0 else 0.0

    def psd_grid(self, frequencies) -> np.ndarray:
        s = np.atleast_1d(np.asarray(frequencies, dtype=float))
        return np.broadcast_to(np.eye(self.channels, dtype=complex), (s.size, self.channels, self.channels)).copy()

    def psd(self, frequency: float) -> np.ndarray:
        return np.eye(self.channels, dtype=complex)

    def phi_inf(self) -> float:
        return 1.0

    def r1_norm(self) -> float:
        return 1.0

    def decay(self) -> tuple[float, float]:
        return (1.0, 0.0)


@dataclass(frozen=True)
class DecayCertificate:
    """Certified envelope ||R[k]||_2 <= gamma * rho^|k| for a state-space model."""

    gamma: float
    rho: float
    kappa: float
    weight_matrix: np.ndarray


@dataclass(frozen=True)
class StateSpace:
    """Stable linear state-space process driven by standard normal noise.

    x[k+1] = A x[k] + B e[k],  y[k] = C x[k] + D e[k], with i.i.d. standard
    normal e[k] and the state started from its stationary law.  ``decay_rho``
    picks the rate of the certified autocovariance envelope; it defaults to
    the midpoint between the spectral radius of A and one.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    decay_rho: float | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.atleast_2d(np.asarray(self.b, dtype=float))
        c = np.atleast_2d(np.asarray(self.c, dtype=float))
        d = np.atleast_2d(np.asarray(self.d, dtype=float))
        if a.shape[0] != a.shape[1]:
            raise ValueError("state transition matrix must be square")
        states = a.shape[0]
        if b.shape[0] != states or c.shape[1] != states or d.shape != (c.shape[0], b.shape[1]):
            raise ValueError("state-space matrix dimensions are inconsistent")
        radius = spectral_radius(a)
        if radius >= 1.0:
            raise ValueError("state transition matrix must be stable (spectral radius < 1)")
        if self.decay_rho is not None and not radius < self.decay_rho < 1.0:
            raise ValueError("decay_rho must lie strictly between the spectral radius and one")
        for name, arr in (("a", a), ("b", b), ("c", c), ("d", d)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def channels(self) -> int:
        return self.c.shape[0]

    @property
    def state_dim(self) -> int:
        return self.a.shape[0]

    @property
    def noise_dim(self) -> int:
        return self.b.shape[1]

    @cached_property
    def state_covariance(self) -> np.ndarray:
        """Stationary state covariance X = A X A' + B B'."""
        return solve_discrete_lyapunov(self.a, self.b @ self.b.T)

    @cached_property
    def _lag_seed(self) -> np.ndarray:
        # R[k] = C A^(k-1) (A X C' + B D') for k >= 1
        return self.a @ self.state_covariance @ self.c.T + self.b @ self.d.T

    def autocov(self, k: int) -> np.ndarray:
        k = int(k)
        if k < 0:
            return self.autocov(-k).T
        if k == 0:
            return self.c @ self.state_covariance @ self.c.T + self.d @ self.d.T
        return self.c @ np.linalg.matrix_power(self.a, k - 1) @ self._lag_seed

    def autocov_stack(self, max_lag: int) -> np.ndarray:
        n = self.channels
        out = np.empty((max_lag + 1, n, n))
        out[0] = self.autocov(0)
        cross = self._lag_seed
        for k in range(1, max_lag + 1):
            out[k] = self.c @ cross
            cross = self.a @ cross
        return out

    @cached_property
    def decay_certificate(self) -> DecayCertificate:
        target = self.decay_rho
        if target is None:
            target = 0.5 * (spectral_radius(self.a) + 1.0)
        return certify_decay(self, target)

    def decay(self) -> tuple[float, float]:
        cert = self.decay_certificate
        return (cert.gamma, cert.rho)

    def autocov_tail(self, lag: int) -> float:
        if lag <= 0:
            return self.r1_norm()
        gamma, rho = self.decay()
        return 2.0 * gamma * rho ** lag / (1.0 - rho)

    def transfer(self, frequency: float) -> np.ndarray:
        """Frequency response H(s) = D + C (e^{j2 pi s} I - A)^{-1} B."""
        z = np.exp(2j * np.pi * float(frequency))
        resolvent = np.linalg.solve(z * np.eye(self.state_dim) - self.a, self.b.astype(complex))
        return self.d + self.c @ resolvent

    def psd(self, frequency: float) -> np.ndarray:
        h = self.transfer(frequency)
        return h @ h.conj().T

    def psd_grid(self, frequencies) -> np.ndarray:
        s = np.atleast_1d(np.asarray(frequencies, dtype=float))
        return np.stack([self.psd(freq) for freq in s])

    @cached_property
    def _phi_inf(self) -> float:
        return grid_phi_inf(self)

    def phi_inf(self) -> float:
        return self._phi_inf

    @cached_property
    def _r1(self) -> float:
        gamma, rho = self.decay()
        if rho == 0.0:
            depth = 1
        else:
            # pick a depth at which the certified remainder is negligible
            depth = int(math.ceil(math.log(1e-9 * (1.0 - rho) / (2.0 * gamma)) / math.log(rho)))
            depth = min(max(depth, 1), 100_000)
        return r1_norm_bound(self, depth)[0]

    def r1_norm(self) -> float:
        return self._r1


def r1_norm_bound(model, depth: int) -> tuple[float, float]:
    """Partial sum of ||R[k]||_2 to ``depth`` plus a certified geometric remainder.

    Returns (upper bound on the summed covariance norms, remainder used).
    """
    stack = model.autocov_stack(depth)
    norms = np.linalg.svd(stack, compute_uv=False)[:, 0]
    partial = float(norms[0] + 2.0 * norms[1:].sum())
    gamma, rho = model.decay()
    remainder = 0.0 if rho == 0.0 else 2.0 * gamma * rho ** (depth + 1) / (1.0 - rho)
    return partial + remainder, remainder


def certify_decay(model: StateSpace, rho_target: float) -> DecayCertificate:
    """Constructive decay pair for a state-space model via a weighted stability bound.

    Solves P = (A/rho)' P (A/rho) + I, so A' P A is dominated by rho^2 P, and
    turns its condition number into the envelope scale

        gamma = max(||C X C' + D D'||,
                    sqrt(kappa) ||C|| (||B D'|| / rho + ||X C'||)).
    """
    radius = spectral_radius(model.a)
    if not radius < rho_target < 1.0:
        raise ValueError("rho_target must lie strictly between the spectral radius and one")
    scaled = model.a / rho_target
    weight = solve_discrete_lyapunov(scaled.T, np.eye(model.state_dim))
    eigenvalues = np.linalg.eigvalsh(weight)
    kappa = float(eigenvalues.max() / eigenvalues.min())
    x = model.state_covariance
    static = float(np.linalg.norm(model.c @ x @ model.c.T + model.d @ model.d.T, 2))
    driven = (
        math.sqrt(kappa)
        * float(np.linalg.norm(model.c, 2))
        * (
            float(np.linalg.norm(model.b @ model.d.T, 2)) / rho_target
            + float(np.linalg.norm(x @ model.c.T, 2))
        )
    )
    return DecayCertificate(max(static, driven), float(rho_target), kappa, weight)


def exact_autocov(model, k: int) -> np.ndarray:
    return model.autocov(k)


def psd(model, frequency: float) -> np.ndarray:
    return model.psd(frequency)


def phi_inf(model) -> float:
    return model.phi_inf()


def r1_norm(model) -> float:
    return model.r1_norm()


def _check_noise(noise: str) -> None:
    if noise not in NOISE_KINDS:
        raise ValueError(f"unknown noise kind {noise!r}")


def _draw_noise(rng: np.random.Generator, noise: str, shape) -> np.ndarray:
    if noise == "gaussian":
        return rng.standard_normal(shape)
    return rng.uniform(-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH, shape)


def sample_geometric_paths(
    rho: float,
    num_samples: int,
    trials: int,
    noise: str = "gaussian",
    seed: int = 0,
    first_trial: int = 0,
) -> np.ndarray:
    """Stationary paths of the geometric scalar model, one stream per trial.

    Gaussian shocks admit an exact stationary start; the uniform case burns in
    from zero long enough that the start-up transient is below 1e-12.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    _check_noise(noise)
    if num_samples < 1 or trials < 1:
        raise ValueError("num_samples and trials must be positive")
    gain = math.sqrt(1.0 - rho * rho)
    out = np.empty((trials, num_samples))
    if noise == "gaussian":
        for t in range(trials):
            rng = rng_stream(seed, first_trial + t)
            start = rng.standard_normal()
            shocks = rng.standard_normal(num_samples)
            out[t] = lfilter([gain], [1.0, -rho], shocks, zi=np.array([rho * start]))[0]
    else:
        burn = 0 if rho == 0.0 else int(math.ceil(math.log(1e-12) / math.log(rho)))
        for t in range(trials):
            rng = rng_stream(seed, first_trial + t)
            shocks = _draw_noise(rng, noise, burn + num_samples)
            out[t] = lfilter([gain], [1.0, -rho], shocks)[burn:]
    return out


def sample_geometric(
    rho: float, num_samples: int, noise: str = "gaussian", seed: int = 0, trial: int = 0
) -> DataMatrix:
    """One stationary path of the geometric scalar model as a 1 x N data block."""
    path = sample_geometric_paths(rho, num_samples, 1, noise, seed, first_trial=trial)
    return DataMatrix(path)


def sample_white_paths(
    channels: int,
    num_samples: int,
    trials: int,
    noise: str = "gaussian",
    seed: int = 0,
    first_trial: int = 0,
) -> np.ndarray:
    """Independent unit-variance noise blocks, one stream per trial."""
    _check_noise(noise)
    if channels < 1 or num_samples < 1 or trials < 1:
        raise ValueError("channels, num_samples and trials must be positive")
    out = np.empty((trials, channels, num_samples))
    for t in range(trials):
        rng = rng_stream(seed, first_trial + t)
        out[t] = _draw_noise(rng, noise, (channels, num_samples))
    return out


def sample_white(
    channels: int, num_samples: int, noise: str = "gaussian", seed: int = 0, trial: int = 0
) -> DataMatrix:
    return DataMatrix(sample_white_paths(channels, num_samples, 1, noise, seed, first_trial=trial)[0])


def _covariance_root(covariance: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(covariance)
    return v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))


def sample_state_space_paths(
    model: StateSpace, num_samples: int, trials: int, seed: int = 0, first_trial: int = 0
) -> np.ndarray:
    """Stationary state-space paths (trials, channels, samples), one stream per trial.

    The state starts from its exact stationary law.  Each trial is computed
    on its own, so path t is bitwise identical no matter how trials are
    batched or scheduled.
    """
    if num_samples < 1 or trials < 1:
        raise ValueError("num_samples and trials must be positive")
    root = _covariance_root(model.state_covariance)
    out = np.empty((trials, model.channels, num_samples))
    a, b, c, d = model.a, model.b, model.c, model.d
    for t in range(trials):
        rng = rng_stream(seed, first_trial + t)
        state = root @ rng.standard_normal(model.state_dim)
        shocks = rng.standard_normal((model.noise_dim, num_samples))
        for k in range(num_samples):
            z = shocks[:, k]
            out[t, :, k] = c @ state + d @ z
            state = a @ state + b @ z
    return out


def sample_state_space(model: StateSpace, num_samples: int, seed: int = 0, trial: int = 0) -> DataMatrix:
    return DataMatrix(sample_state_space_paths(model, num_samples, 1, seed, first_trial=trial)[0])
