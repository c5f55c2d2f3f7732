"""Experiment drivers: configuration, runners, reproduction studies, reports.

This module is the engine behind the command line.  Configs are flat JSON
documents; every runner is a pure function of (config, seed) and emits CSVs
whose first line records the config hash and seed, so repeated runs are
byte-identical.  The two bundled reproduction studies sweep the number of
tapered segments and emit three-curve reports (empirical worst-grid error,
total certificate, bias curve) as CSV plus a log-scale SVG plot.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds, estimators, signals
from .concentration import gaussian_hw_tail, hanson_wright_tail, monte_carlo_tail_check
from .constants import GAUSSIAN, sub_gaussian
from .quadform import (
    DataMatrix,
    SpectralEstimate,
    evaluate_generic_grid,
    exact_bias_sup,
    frequency_grid,
    hermitian_spectral_norms,
)
from .streams import rng_stream
from .svgplot import Series, line_plot

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ReproduceOptions",
    "apply_overrides",
    "example_state_space",
    "format_number",
    "load_config",
    "make_context",
    "parse_config",
    "read_estimate_csv",
    "run_certify",
    "run_estimate",
    "run_reproduce",
    "run_simulate",
    "run_verify_concentration",
    "write_csv",
]


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending key."""


def format_number(value) -> str:
    """CSV cell format: plain inside [1e-3, 1e4), scientific outside."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if v == 0.0:
        return "0"
    if 1e-3 <= abs(v) < 1e4:
        return f"{v:.12g}"
    return f"{v:.12e}"


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    return format_number(value)


def write_csv(path, columns, rows, meta) -> Path:
    """Write a CSV with one comment line of metadata and a header row."""
    lines = ["# " + " ".join(f"{key}={value}" for key, value in meta.items())]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_cell(cell) for cell in row))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description plus the raw document it came from."""

    raw: dict = field(repr=False)
    model: object | None
    noise: str
    estimator: object | None
    num_samples: int | None
    grid_points: int
    full_range: bool
    trials: int
    delta: float
    epsilon: float | None
    seed: int
    context_overrides: dict


def config_digest(config: ExperimentConfig) -> str:
    payload = json.dumps(config.raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise ConfigError(f"{where}.{key} is required")
    value = data[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"{where}.{key} has the wrong type")
    return value


def _parse_model(data: dict):
    kind = _require(data, "kind", str, "model")
    try:
        if kind in ("geometric", "ar1"):
            return signals.GeometricScalar(float(_require(data, "rho", (int, float), "model")))
        if kind == "white":
            return signals.WhiteNoise(int(data.get("channels", 1)))
        if kind == "state_space":
            return signals.StateSpace(
                _require(data, "a", list, "model"),
                _require(data, "b", list, "model"),
                _require(data, "c", list, "model"),
                _require(data, "d", list, "model"),
                decay_rho=data.get("rho_target"),
            )
    except (ValueError, TypeError) as err:
        raise ConfigError(f"model: {err}") from err
    raise ConfigError(f"model.kind {kind!r} is not one of geometric, white, state_space")


def _parse_estimator(data: dict):
    kind = _require(data, "kind", str, "estimator")
    try:
        if kind == "biased_periodogram":
            return estimators.BiasedPeriodogram()
        if kind == "unbiased_periodogram":
            return estimators.UnbiasedPeriodogram()
        if kind == "blackman_tukey":
            return estimators.BlackmanTukey(
                int(_require(data, "half_width", int, "estimator")),
                data.get("window", "rectangular"),
            )
        if kind == "bartlett":
            return estimators.Bartlett(int(_require(data, "block_length", int, "estimator")))
        if kind == "welch":
            return estimators.Welch(
                int(_require(data, "segment_length", int, "estimator")),
                int(_require(data, "hop", int, "estimator")),
                data.get("taper", "hann"),
            )
    except (ValueError, TypeError) as err:
        raise ConfigError(f"estimator: {err}") from err
    raise ConfigError(
        f"estimator.kind {kind!r} is not one of biased_periodogram, unbiased_periodogram, "
        "blackman_tukey, bartlett, welch"
    )


def parse_config(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    known = {
        "model", "noise", "estimator", "num_samples", "grid_points", "full_range",
        "trials", "delta", "epsilon", "seed", "context",
    }
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
    noise = data.get("noise", "gaussian")
    if noise not in signals.NOISE_KINDS:
        raise ConfigError(f"noise must be one of {signals.NOISE_KINDS}")
    model = _parse_model(data["model"]) if "model" in data else None
    estimator = _parse_estimator(data["estimator"]) if "estimator" in data else None
    num_samples = data.get("num_samples")
    if num_samples is not None and (not isinstance(num_samples, int) or num_samples < 1):
        raise ConfigError("num_samples must be a positive integer")
    grid_points = data.get("grid_points", 101)
    if not isinstance(grid_points, int) or grid_points < 1:
        raise ConfigError("grid_points must be a positive integer")
    trials = data.get("trials", 100)
    if not isinstance(trials, int) or trials < 1:
        raise ConfigError("trials must be a positive integer")
    delta = data.get("delta", 0.05)
    if not isinstance(delta, (int, float)) or not 0.0 < float(delta) < 1.0:
        raise ConfigError("delta must lie in (0, 1)")
    epsilon = data.get("epsilon")
    if epsilon is not None and (not isinstance(epsilon, (int, float)) or not float(epsilon) > 0.0):
        raise ConfigError("epsilon must be positive when given")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    context = data.get("context", {})
    if not isinstance(context, dict):
        raise ConfigError("context must be an object")
    full_range = data.get("full_range", False)
    if not isinstance(full_range, bool):
        raise ConfigError("full_range must be a boolean")
    return ExperimentConfig(
        raw=data,
        model=model,
        noise=noise,
        estimator=estimator,
        num_samples=num_samples,
        grid_points=grid_points,
        full_range=full_range,
        trials=trials,
        delta=float(delta),
        epsilon=None if epsilon is None else float(epsilon),
        seed=seed,
        context_overrides=context,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from err
    return parse_config(data)


def apply_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Re-parse the config with CLI overrides folded into the raw document."""
    data = dict(config.raw)
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return parse_config(data)


def _assumption_for(noise: str):
    return GAUSSIAN if noise == "gaussian" else sub_gaussian(signals.UNIFORM_SIGMA)


_CONTEXT_FIELDS = ("phi_inf", "r1", "channels")


def make_context(config: ExperimentConfig) -> bounds.BoundContext:
    """Bound context from the model, or from explicit context fields without one."""
    assumption = _assumption_for(config.noise)
    overrides = config.context_overrides
    if config.model is not None:
        ctx = bounds.BoundContext.from_model(config.model, assumption)
        if overrides:
            decay = ctx.decay
            if "gamma" in overrides or "rho" in overrides:
                base = decay or (1.0, 0.0)
                decay = (float(overrides.get("gamma", base[0])), float(overrides.get("rho", base[1])))
            ctx = bounds.BoundContext(
                assumption,
                float(overrides.get("phi_inf", ctx.phi_inf)),
                float(overrides.get("r1", ctx.r1_norm)),
                int(overrides.get("channels", ctx.channels)),
                decay,
                ctx.model,
            )
        return ctx
    missing = [name for name in _CONTEXT_FIELDS if name not in overrides]
    if missing:
        raise ConfigError("context missing fields: " + ", ".join(missing))
    decay = None
    if "gamma" in overrides and "rho" in overrides:
        decay = (float(overrides["gamma"]), float(overrides["rho"]))
    try:
        return bounds.BoundContext(
            assumption,
            float(overrides["phi_inf"]),
            float(overrides["r1"]),
            int(overrides["channels"]),
            decay,
        )
    except ValueError as err:
        raise ConfigError(f"context: {err}") from err


def sample_model(model, noise: str, num_samples: int, seed: int, trial: int = 0) -> DataMatrix:
    """Draw one path from the configured model with the matching sampler."""
    if isinstance(model, signals.GeometricScalar):
        return signals.sample_geometric(model.rho, num_samples, noise, seed, trial)
    if isinstance(model, signals.WhiteNoise):
        return signals.sample_white(model.channels, num_samples, noise, seed, trial)
    if isinstance(model, signals.StateSpace):
        if noise != "gaussian":
            raise ConfigError("state-space sampling supports gaussian noise only")
        return signals.sample_state_space(model, num_samples, seed, trial)
    raise ConfigError(f"cannot sample from model {type(model).__name__}")


def _need(config: ExperimentConfig, what: str):
    value = getattr(config, what)
    if value is None:
        raise ConfigError(f"{what} is required for this command")
    return value


def run_simulate(config: ExperimentConfig, out_dir) -> Path:
    """Export one sampled path as CSV with columns t, y1..yn."""
    model = _need(config, "model")
    num_samples = _need(config, "num_samples")
    data = sample_model(model, config.noise, num_samples, config.seed, trial=0)
    columns = ["t"] + [f"y{i + 1}" for i in range(data.channels)]
    rows = [[t] + list(data.values[:, t]) for t in range(data.samples)]
    meta = {"config_hash": config_digest(config), "seed": config.seed}
    return write_csv(Path(out_dir) / "simulate.csv", columns, rows, meta)


def _estimate_columns(channels: int) -> list[str]:
    columns = ["frequency"]
    for i in range(channels):
        for j in range(i, channels):
            columns += [f"re_{i + 1}_{j + 1}", f"im_{i + 1}_{j + 1}"]
    return columns


def run_estimate(config: ExperimentConfig, out_dir, oracle: bool = False) -> Path:
    """Estimate the spectrum of one sampled path over the grid and write it as CSV.

    ``oracle`` forces the dense generic quadratic-form path in place of the
    fast structured one.
    """
    model = _need(config, "model")
    spec = _need(config, "estimator")
    num_samples = _need(config, "num_samples")
    grid = frequency_grid(config.grid_points, config.full_range)
    data = sample_model(model, config.noise, num_samples, config.seed, trial=0)
    if oracle:
        estimate = evaluate_generic_grid(data, estimators.build_matrix(spec, num_samples), grid)
    else:
        estimate = estimators.evaluate_fast(spec, data, grid)
    n = estimate.channels
    rows = []
    for idx, freq in enumerate(estimate.frequencies):
        row = [float(freq)]
        for i in range(n):
            for j in range(i, n):
                row += [estimate.matrices[idx, i, j].real, estimate.matrices[idx, i, j].imag]
        rows.append(row)
    meta = {
        "config_hash": config_digest(config),
        "seed": config.seed,
        "oracle": oracle,
        "channels": n,
    }
    return write_csv(Path(out_dir) / "estimate.csv", _estimate_columns(n), rows, meta)


def read_estimate_csv(path) -> SpectralEstimate:
    """Rebuild a Hermitian spectral estimate from an estimate CSV."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = [line for line in lines if line and not line.startswith("#")]
    header = body[0].split(",")
    pairs = (len(header) - 1) // 2
    channels = int((math.isqrt(8 * pairs + 1) - 1) // 2)
    freqs, matrices = [], []
    for line in body[1:]:
        cells = [float(cell) for cell in line.split(",")]
        freqs.append(cells[0])
        matrix = np.zeros((channels, channels), dtype=complex)
        pos = 1
        for i in range(channels):
            for j in range(i, channels):
                value = cells[pos] + 1j * cells[pos + 1]
                matrix[i, j] = value
                matrix[j, i] = value.conjugate()
                pos += 2
        matrices.append(matrix)
    return SpectralEstimate(np.array(freqs), np.stack(matrices))


def _certificate_row(cert: bounds.Certificate) -> list:
    inputs = ";".join(f"{key}={_format_cell(value)}" for key, value in cert.inputs)
    holds = "" if cert.holds is None else ("true" if cert.holds else "false")
    return [
        cert.statement,
        "true" if cert.available else "false",
        holds,
        cert.value,
        cert.epsilon,
        cert.delta,
        inputs,
        cert.note,
    ]


def run_certify(config: ExperimentConfig, out_dir, estimate_path=None):
    """Evaluate the certificate suite for the configured estimator and context.

    Emits one row per statement; rows whose certificate does not exist are
    marked unavailable rather than omitted.  Returns (path, certificates).
    """
    spec = _need(config, "estimator")
    num_samples = _need(config, "num_samples")
    ctx = make_context(config)
    params = estimators.certificate_params(spec, num_samples)
    certs: list[bounds.Certificate] = []
    if params is None:
        note = "periodogram norm envelope is at least one"
        certs.append(bounds.Certificate("pointwise_bound", available=False, note=note))
        certs.append(bounds.Certificate("worst_case_bound", available=False, note=note))
    else:
        certs.append(bounds.pointwise_error_bound(params.envelope, config.delta, ctx))
        certs.append(bounds.worst_case_error_bound(params.envelope, params.truncation, config.delta, ctx))
    bias_cert = None
    if ctx.decay is not None:
        gamma, rho = ctx.decay
        bias = estimators.closed_form_bias(spec, num_samples)
        truncation = params.truncation if params is not None else num_samples
        bias_cert = bounds.geometric_bias_bound(bias, truncation, gamma, rho)
        certs.append(bias_cert)
    if params is not None and bias_cert is not None:
        total = certs[1].value + bias_cert.value
        certs.append(
            bounds.Certificate(
                "total_worst_bound",
                value=total,
                delta=config.delta,
                inputs=(("concentration", certs[1].value), ("bias", bias_cert.value)),
            )
        )
    if estimate_path is not None:
        if params is None or bias_cert is None:
            certs.append(
                bounds.Certificate(
                    "data_driven_bound",
                    available=False,
                    note="needs a concentration envelope and a decay pair",
                )
            )
        else:
            factor = bounds.data_driven_factor(params.envelope, params.truncation, config.delta, ctx)
            estimate = read_estimate_csv(estimate_path)
            certs.append(bounds.data_driven_error_bound(factor, bias_cert.value, estimate.sup_norm()))
    if config.epsilon is not None:
        for part in bounds.CONDITION_PARTS:
            certs.append(
                bounds.check_estimator_conditions(
                    spec, num_samples, part, config.epsilon, config.delta, ctx
                )
            )
    columns = ["statement", "available", "holds", "value", "epsilon", "delta", "inputs", "note"]
    meta = {"config_hash": config_digest(config), "seed": config.seed, "delta": config.delta}
    path = write_csv(Path(out_dir) / "certificates.csv", columns, [_certificate_row(c) for c in certs], meta)
    return path, certs


def example_state_space(rho_target: float = 0.5) -> signals.StateSpace:
    """Three-output chain system used by the second bundled reproduction study."""
    return signals.StateSpace(
        a=[[0.3, 0.0], [1.0, 0.3]],
        b=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        c=[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        d=np.eye(3),
        decay_rho=rho_target,
    )


@dataclass(frozen=True)
class ReproduceOptions:
    """Knobs of the bundled reproduction studies (all recorded in the output)."""

    trials: int = 100
    seed: int = 20240311
    delta: float = 0.05
    segment_length: int = 32
    hop: int = 16
    taper: str = "hann"
    grid_points: int = 101
    blocks: tuple = (8, 16, 32, 64, 128)
    rho: float = 0.3
    rho_target: float = 0.5


_SWEEP_COLUMNS = [
    "blocks",
    "num_samples",
    "empirical_mean",
    "empirical_max",
    "certificate",
    "concentration_bound",
    "bias_bound",
    "exact_bias",
]


def _sweep_rows(model, noise: str, options: ReproduceOptions, noise_index: int):
    """One row per segment count: empirical worst-grid error vs certificates."""
    grid = frequency_grid(options.grid_points)
    truth = model.psd_grid(grid)
    ctx = bounds.BoundContext.from_model(model, _assumption_for(noise))
    gamma, rho = ctx.decay
    rows = []
    for sweep_index, blocks in enumerate(options.blocks):
        num_samples = (blocks - 1) * options.hop + options.segment_length
        spec = estimators.Welch(options.segment_length, options.hop, options.taper)
        params = estimators.certificate_params(spec, num_samples)
        bias = estimators.closed_form_bias(spec, num_samples)
        concentration = bounds.worst_case_error_bound(
            params.envelope, params.truncation, options.delta, ctx
        ).value
        bias_bound = bounds.geometric_bias_bound(bias, params.truncation, gamma, rho).value
        exact_bias = exact_bias_sup(bias, model, grid)
        first = (noise_index * len(options.blocks) + sweep_index) * options.trials
        if isinstance(model, signals.StateSpace):
            paths = signals.sample_state_space_paths(
                model, num_samples, options.trials, options.seed, first_trial=first
            )
        else:
            paths = signals.sample_geometric_paths(
                model.rho, num_samples, options.trials, noise, options.seed, first_trial=first
            )[:, None, :]
        errors = np.empty(options.trials)
        for t in range(options.trials):
            estimate = estimators.evaluate_fast(spec, DataMatrix(paths[t]), grid)
            errors[t] = float(hermitian_spectral_norms(estimate.matrices - truth).max())
        rows.append(
            [
                blocks,
                num_samples,
                float(errors.mean()),
                float(errors.max()),
                concentration + bias_bound,
                concentration,
                bias_bound,
                exact_bias,
            ]
        )
    return rows


def _sweep_report(rows, out_dir, stem: str, meta: dict, bias_series: str) -> list[Path]:
    csv_path = write_csv(Path(out_dir) / f"{stem}.csv", _SWEEP_COLUMNS, rows, meta)
    blocks = [row[0] for row in rows]
    bias_column = _SWEEP_COLUMNS.index(bias_series)
    svg_path = line_plot(
        Path(out_dir) / f"{stem}.svg",
        [
            Series("empirical max-over-grid error", tuple(blocks), tuple(row[2] for row in rows)),
            Series("total certificate", tuple(blocks), tuple(row[4] for row in rows), dash="6,4"),
            Series(
                bias_series.replace("_", " "),
                tuple(blocks),
                tuple(row[bias_column] for row in rows),
                color="#d62728",
                dash="2,3",
            ),
        ],
        title=stem.replace("_", " "),
        x_label="number of segments",
        y_label="spectral-norm error",
    )
    return [csv_path, svg_path]


def run_reproduce(example: int, out_dir, options: ReproduceOptions = ReproduceOptions()) -> list[Path]:
    """Run one of the bundled studies; returns the emitted file paths.

    Study 1 sweeps the tapered-segment estimator on the scalar geometric
    process under Gaussian and scaled-uniform noise; study 2 does the same for
    the three-channel state-space process, with the certified decay envelope
    standing in for the exact bias curve.
    """
    base_meta = {
        "trials": options.trials,
        "delta": options.delta,
        "seed": options.seed,
        "segment_length": options.segment_length,
        "hop": options.hop,
        "taper": options.taper,
        "grid_points": options.grid_points,
    }
    if example == 1:
        model = signals.GeometricScalar(options.rho)
        paths = []
        for noise_index, noise in enumerate(("gaussian", "uniform")):
            rows = _sweep_rows(model, noise, options, noise_index)
            stem = "example1_gaussian" if noise == "gaussian" else "example1_subgaussian"
            meta = dict(base_meta, example=1, noise=noise, rho=options.rho)
            meta["config_hash"] = _options_digest(meta)
            paths += _sweep_report(rows, out_dir, stem, meta, "exact_bias")
        return paths
    if example == 2:
        model = example_state_space(options.rho_target)
        rows = _sweep_rows(model, "gaussian", options, noise_index=0)
        meta = dict(base_meta, example=2, noise="gaussian", rho_target=options.rho_target)
        meta["config_hash"] = _options_digest(meta)
        return _sweep_report(rows, out_dir, "example2", meta, "bias_bound")
    raise ConfigError("example must be 1 or 2")


def _options_digest(meta: dict) -> str:
    payload = json.dumps({k: str(v) for k, v in meta.items()}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def _symmetric_gaussian_matrix(dim: int, rng) -> np.ndarray:
    raw = rng.standard_normal((dim, dim))
    return 0.5 * (raw + raw.T)


def run_verify_concentration(
    out_dir, trials: int = 100_000, seed: int = 987654321, dims=(4, 16), eps_points: int = 20
):
    """Monte Carlo validation of the quadratic-form tail bounds.

    Runs a Gaussian suite against the Gaussian tail and a scaled-uniform suite
    against the psi2 tail, for each matrix dimension.  Returns (path, reports);
    any flagged row indicates a bug since the bounds are proven.
    """
    if trials < 10_000:
        raise ConfigError("verify-concentration needs trials >= 10000")
    rows = []
    reports = {}
    for suite_index, dim in enumerate(dims):
        matrix = _symmetric_gaussian_matrix(dim, rng_stream(seed, 1000 + suite_index))
        frob = float(np.linalg.norm(matrix))
        spec_norm = float(np.abs(np.linalg.eigvalsh(matrix)).max())
        trace = float(np.trace(matrix))

        def statistic(batch, matrix=matrix, trace=trace):
            return np.einsum("ti,ij,tj->t", batch, matrix, batch) - trace

        suites = {
            "gaussian": (
                lambda rng, count: rng.standard_normal((count, dim)),
                lambda eps: gaussian_hw_tail(eps, frob, spec_norm),
                max(math.sqrt(72.0) * frob, 72.0 * spec_norm),
            ),
            "uniform": (
                lambda rng, count: rng.uniform(
                    -signals.UNIFORM_HALF_WIDTH, signals.UNIFORM_HALF_WIDTH, (count, dim)
                ),
                lambda eps: hanson_wright_tail(eps, 2.0 * signals.UNIFORM_SIGMA, frob, spec_norm),
                max(math.sqrt(1500.0) * 12.0 * frob, 1500.0 * 12.0 * spec_norm),
            ),
        }
        for suite_offset, (name, (sampler, bound_fn, eps_max)) in enumerate(suites.items()):
            grid = np.linspace(0.0, eps_max, eps_points)
            report = monte_carlo_tail_check(
                sampler, statistic, bound_fn, grid, trials, seed + 7 * suite_index + suite_offset
            )
            reports[(name, dim)] = report
            for row in report.rows:
                rows.append([name, dim, row.eps, row.empirical, row.bound, row.flagged])
    columns = ["suite", "dim", "eps", "empirical", "bound", "flagged"]
    meta = {"seed": seed, "trials": trials, "config_hash": _options_digest({"seed": seed, "trials": trials, "dims": dims})}
    path = write_csv(Path(out_dir) / "concentration_check.csv", columns, rows, meta)
    return path, reports
