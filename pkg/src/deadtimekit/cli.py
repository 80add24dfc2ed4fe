"""Command-line front end: simulate, histogram, fit, evaluate, reproduce.

Configuration is a JSON file; validation errors name the offending field
path.  Exit codes: 0 success, 2 configuration error, 3 non-physical
closed-form correction (only on the correction subpath), 4 fit
non-convergence.
"""

from __future__ import annotations

import json
from pathlib import Path

import click
import numpy as np

from .core import (
    ConfigError,
    DetectorConfig,
    FluxCurve,
    dump_json,
    load_timestamps_csv,
    save_histogram_csv,
    save_timestamps_csv,
)
from .estimator import (
    FitError,
    cross_validate,
    forward_flux,
    model_from_json,
    trim_spline_knots,
)
from .evaluation import evaluation_loss, optimal_scale
from .histograms import (
    WindowError,
    active_fraction,
    build_active_histogram,
    build_count_histogram,
    measured_rate,
)
from .models import NonPhysicalEstimateError, muller_correct
from .scenarios import SCENARIOS, run_scenario
from .simulator import (
    AttenuationSpec,
    GaussianTargetSpec,
    attenuate,
    constant_flux,
    gaussian_flux,
    simulate_dataset,
)
from .scenarios import structured_pulse_flux

EXIT_CONFIG_ERROR = 2
EXIT_NONPHYSICAL = 3
EXIT_NONCONVERGENCE = 4


class _CliError(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _config_error(message: str) -> _CliError:
    return _CliError(message, EXIT_CONFIG_ERROR)


# ---------------------------------------------------------------------------
# Config parsing with field-path diagnostics
# ---------------------------------------------------------------------------

def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise _config_error(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise _config_error(f"config is not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise _config_error("config root must be a JSON object")
    return obj


def _field(obj: dict, path: str, default=_config_error):
    cur = obj
    for part in path.split("."):
        if not isinstance(cur, dict) or part not in cur:
            if default is not _config_error:
                return default
            raise _config_error(f"missing config field '{path}'")
        cur = cur[part]
    return cur


def _detector_from(obj: dict) -> DetectorConfig:
    det = _field(obj, "detector")
    try:
        return DetectorConfig(
            tau=float(_field(obj, "detector.tau")),
            bin_width=float(_field(obj, "detector.bin_width")),
            num_bins=int(_field(obj, "detector.num_bins")),
            num_shots=int(_field(obj, "detector.num_shots")),
            window_start=float(det.get("window_start", 0.0)),
        )
    except ConfigError as exc:
        raise _config_error(f"in config field 'detector': {exc}")
    except (TypeError, ValueError) as exc:
        raise _config_error(f"in config field 'detector': {exc}")


def _flux_from(obj: dict, config: DetectorConfig) -> FluxCurve:
    kind = _field(obj, "flux.kind")
    try:
        if kind == "constant":
            flux = constant_flux(float(_field(obj, "flux.rate")), config)
        elif kind == "gaussian":
            spec = GaussianTargetSpec(
                peak_rate=float(_field(obj, "flux.peak_rate")),
                center=float(_field(obj, "flux.center")),
                sigma=float(_field(obj, "flux.sigma")),
                background_rate=float(_field(obj, "flux", {}).get("background_rate", 0.0)),
            )
            flux = gaussian_flux(spec, config)
        elif kind == "structured_pulse":
            flux = structured_pulse_flux(float(_field(obj, "flux.peak_rate")), config)
        else:
            raise _config_error(
                f"config field 'flux.kind' must be one of constant, gaussian, "
                f"structured_pulse; got {kind!r}"
            )
    except ConfigError as exc:
        raise _config_error(f"in config field 'flux': {exc}")
    od = _field(obj, "attenuation.optical_density", None)
    if od is not None:
        flux = attenuate(flux, AttenuationSpec.from_od(float(od)))
    return flux


def _parse_orders(spec: str):
    """Parse '0..8' (inclusive range) or a single integer like '4'."""
    try:
        if ".." in spec:
            lo, hi = spec.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(spec)]
    except ValueError:
        raise _config_error(f"--orders must look like '0..8' or '4', got {spec!r}")


def _echo(quiet: bool, message: str) -> None:
    if not quiet:
        click.echo(message)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@click.group()
@click.version_option()
def main():
    """Photon-counting deadtime simulation, histogramming and flux estimation."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="JSON config with detector and flux sections.")
@click.option("--seed", type=click.IntRange(min=0), default=12345, show_default=True, help="Random stream seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@click.option("--quiet", is_flag=True, help="Suppress progress output.")
def simulate(config_path, seed, out_dir, quiet):
    """Simulate deadtime-filtered photon timestamps to OUT/timestamps.csv."""
    obj = _load_json(config_path)
    config = _detector_from(obj)
    flux = _flux_from(obj, config)
    data = simulate_dataset(flux, config, rng_seed=seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_timestamps_csv(out / "timestamps.csv", data)
    _echo(quiet, f"wrote {data.total_detections} detections over "
                 f"{config.num_shots} shots to {out / 'timestamps.csv'}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--muller", is_flag=True, help="Also emit closed-form-corrected rates (exit 3 if non-physical).")
@click.option("--quiet", is_flag=True)
@click.argument("timestamps", type=click.Path(exists=True))
def histogram(config_path, out_dir, muller, quiet, timestamps):
    """Build count and active-fraction histograms from a timestamp CSV."""
    obj = _load_json(config_path)
    config = _detector_from(obj)
    data = load_timestamps_csv(timestamps, config.num_shots)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        y = build_count_histogram(data, config)
        z = build_active_histogram(data, config)
    except WindowError as exc:
        raise _config_error(str(exc))
    save_histogram_csv(out / "counts.csv", y.counts, config)
    save_histogram_csv(out / "active.csv", z.fractions, config, digits=9)
    if muller:
        try:
            corrected = muller_correct(measured_rate(y, config), config.tau)
        except NonPhysicalEstimateError as exc:
            raise _CliError(str(exc), EXIT_NONPHYSICAL)
        save_histogram_csv(out / "muller.csv", corrected, config, digits=6)
    _echo(quiet, f"active fraction {active_fraction(z):.6f}; wrote histograms to {out}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--loss", type=click.Choice(["deadtime", "poisson"]), default="deadtime", show_default=True)
@click.option("--basis", type=click.Choice(["chebyshev", "spline"]), default="chebyshev", show_default=True)
@click.option("--orders", default="0..8", show_default=True,
              help="Chebyshev candidate orders 'min..max'; for splines the max is the dyadic depth.")
@click.option("--quiet", is_flag=True)
@click.argument("timestamps", type=click.Path(exists=True))
def fit(config_path, out_dir, loss, basis, orders, quiet, timestamps):
    """Cross-validated maximum-likelihood flux fit from a timestamp CSV."""
    obj = _load_json(config_path)
    config = _detector_from(obj)
    data = load_timestamps_csv(timestamps, config.num_shots)
    order_list = _parse_orders(orders)
    try:
        if basis == "chebyshev":
            result = cross_validate(data, config, loss, order_list)
        else:
            result = trim_spline_knots(data, config, loss, max_depth=max(order_list))
    except FitError as exc:
        raise _CliError(str(exc), EXIT_NONCONVERGENCE)
    except (ConfigError, ValueError) as exc:
        raise _config_error(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = result.to_json()
    payload["loss"] = loss
    dump_json(out / "fit.json", payload)
    save_histogram_csv(out / "fitted_rates.csv", forward_flux(result.model, config).rates,
                       config, digits=6)
    _echo(quiet, f"selected {result.selected if basis == 'chebyshev' else f'{len(result.selected)} knots'}; "
                 f"validation loss {result.validation_loss:.4f}")
    if not result.diagnostics.get("converged", False):
        raise _CliError("optimizer did not converge", EXIT_NONCONVERGENCE)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(),
              help="JSON config describing the evaluation dataset geometry.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--quiet", is_flag=True)
@click.argument("fit_json", type=click.Path(exists=True))
@click.argument("eval_timestamps", type=click.Path(exists=True))
def evaluate(config_path, out_dir, quiet, fit_json, eval_timestamps):
    """Score a fitted model against a low-flux evaluation timestamp CSV."""
    obj = _load_json(config_path)
    config = _detector_from(obj)
    with open(fit_json) as fh:
        try:
            model = model_from_json(json.load(fh)["model"])
        except (KeyError, ValueError) as exc:
            raise _config_error(f"invalid fit JSON {fit_json}: {exc}")
    data = load_timestamps_csv(eval_timestamps, config.num_shots)
    flux = forward_flux(model, config)
    y = build_count_histogram(data, config)
    report = {
        "optimal_scale": optimal_scale(flux, y, config),
        "evaluation_loss": evaluation_loss(flux, y, config),
        "eval_detections": int(y.counts.sum()),
    }
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(out / "evaluation.json", report)
    _echo(quiet, f"evaluation loss {report['evaluation_loss']:.4f} "
                 f"(scale {report['optimal_scale']:.6g})")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Override the scenario's default seed.")
@click.option("--quiet", is_flag=True)
@click.argument("scenario", type=click.Choice(sorted(SCENARIOS)))
def reproduce(out_dir, seed, quiet, scenario):
    """Regenerate a bundled study scenario; emits CSV tables and a summary."""
    kwargs = {} if seed is None else {"seed": seed}
    report = run_scenario(scenario, out_dir=out_dir, **kwargs)
    for check in report.checks:
        _echo(quiet, f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    _echo(quiet, f"{'all checks passed' if report.passed else 'some checks FAILED'}; "
                 f"tables written to {out_dir}")


if __name__ == "__main__":
    main()
