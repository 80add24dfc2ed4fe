"""Scenario harnesses for the bundled simulation studies.

Each scenario regenerates one of the headline deadtime experiments at desk
scale, emits plot-ready CSV tables, and evaluates a set of pass/fail checks
that are also asserted by the acceptance test suite.  Every scenario is
deterministic for a fixed seed.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy import stats

from .core import CountHistogram, DetectorConfig, FluxCurve, bin_edges
from .estimator import (
    FitResult,
    OptimizerSettings,
    _trim_on_histograms,
    cross_validate,
    forward_flux,
    thin_alternating,
    trim_spline_knots,
)
from .evaluation import evaluation_loss, rmse
from .histograms import (
    active_fraction,
    build_active_histogram,
    build_count_histogram,
    measured_rate,
)
from .models import NonPhysicalEstimateError, muller_correct
from .simulator import (
    FWHM_TO_SIGMA,
    AttenuationSpec,
    GaussianTargetSpec,
    attenuate,
    gaussian_flux,
    simulate_dataset,
)


@dataclass(frozen=True)
class Check:
    """One pass/fail acceptance check with a human-readable detail string."""

    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    tables: Dict[str, List[dict]]
    checks: Tuple[Check, ...]
    runtime_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> dict:
        return {
            "scenario": self.name,
            "passed": self.passed,
            "runtime_seconds": self.runtime_seconds,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }

    def write(self, out_dir) -> List[Path]:
        """Write one CSV per table plus a machine-readable summary JSON."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for table_name, rows in self.tables.items():
            path = out / f"{self.name}_{table_name}.csv"
            with open(path, "w", newline="") as fh:
                if rows:
                    writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
                    writer.writeheader()
                    writer.writerows(rows)
            written.append(path)
        summary_path = out / f"{self.name}_summary.json"
        with open(summary_path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(summary_path)
        return written


# ---------------------------------------------------------------------------
# Shared narrow-pulse geometry: 50-ns window, 25-ps bins, 25-ns deadtime,
# Gaussian pulse (FWHM 1.18 ns) centered at 10 ns.
# ---------------------------------------------------------------------------

NARROW_TAU = 25e-9
NARROW_BIN_WIDTH = 25e-12
NARROW_NUM_BINS = 2000
NARROW_CENTER = 10e-9
NARROW_SIGMA = 1.18e-9 * FWHM_TO_SIGMA
# Background scales with the peak so every sweep point shares one flux shape,
# which lets all points share a single low-flux evaluation dataset.
NARROW_BACKGROUND_FRACTION = 1e-4

SWEEP_PEAKS_HZ = (25e6, 50e6, 100e6, 200e6, 400e6, 650e6, 1000e6, 2000e6, 3000e6)


def narrow_pulse_config(num_shots: int, tau: float = NARROW_TAU) -> DetectorConfig:
    return DetectorConfig(
        tau=tau,
        bin_width=NARROW_BIN_WIDTH,
        num_bins=NARROW_NUM_BINS,
        num_shots=num_shots,
    )


def narrow_pulse_flux(peak_rate: float, config: DetectorConfig) -> FluxCurve:
    spec = GaussianTargetSpec(
        peak_rate=peak_rate,
        center=NARROW_CENTER,
        sigma=NARROW_SIGMA,
        background_rate=NARROW_BACKGROUND_FRACTION * peak_rate,
    )
    return gaussian_flux(spec, config)


def _narrow_eval_set(seed: int, eval_shots: int, eval_peak: float = 4e6):
    """Low-flux evaluation histogram sharing the sweep's flux shape."""
    cfg = narrow_pulse_config(eval_shots)
    flux = narrow_pulse_flux(eval_peak, cfg)
    data = simulate_dataset(flux, cfg, rng_seed=seed)
    return build_count_histogram(data, cfg), cfg


# ---------------------------------------------------------------------------
# Scenario 1: closed-form correction breaking both of its approximations
# ---------------------------------------------------------------------------

def run_muller_violation(
    seed: int = 101,
    num_shots: int = 200_000,
    peaks_hz: Sequence[float] = (2e6, 5e6, 10e6, 20e6, 40e6, 80e6, 160e6),
) -> ScenarioReport:
    """Both closed-form-correction failure modes on a wide Gaussian pulse.

    Part (a): a Gaussian with sigma = 10 tau is undersampled into a single
    2-us bin; the correction increasingly underestimates the window-mean
    flux as the peak rate rises, because the flux is far from constant
    within the bin.  Part (b): the same pulse sampled at bin width equal
    to tau makes the first bright bin fire in every shot, pushing the
    measured rate to the correction's pole and raising the non-physical
    estimate error.
    """
    t0 = time.time()
    tau = 25e-9
    sigma = 10.0 * tau
    window = 2e-6

    # part (a): simulate on a fine grid, histogram into one coarse bin
    sim_cfg = DetectorConfig(
        tau=tau, bin_width=1e-9, num_bins=int(round(window / 1e-9)), num_shots=num_shots
    )
    spec_rows = []
    rel_errors = []
    for i, peak in enumerate(peaks_hz):
        spec = GaussianTargetSpec(peak_rate=peak, center=window / 2, sigma=sigma)
        flux = gaussian_flux(spec, sim_cfg)
        data = simulate_dataset(flux, sim_cfg, rng_seed=seed + i)
        rate = data.total_detections / (num_shots * window)
        corrected = muller_correct(rate, tau)
        truth_mean = flux.expected_counts / window
        rel = corrected / truth_mean - 1.0
        rel_errors.append(rel)
        spec_rows.append(
            {
                "peak_rate_hz": peak,
                "measured_rate_hz": rate,
                "muller_estimate_hz": corrected,
                "true_mean_rate_hz": truth_mean,
                "relative_error": rel,
            }
        )

    # part (b): bin width = tau, pulse starting bright at the window edge
    fine_cfg = DetectorConfig(
        tau=tau, bin_width=tau, num_bins=int(round(window / tau)), num_shots=10_000
    )
    spec_b = GaussianTargetSpec(peak_rate=2e9, center=0.0, sigma=sigma)
    flux_b = gaussian_flux(spec_b, fine_cfg)
    data_b = simulate_dataset(flux_b, fine_cfg, rng_seed=seed + 1000)
    y_b = build_count_histogram(data_b, fine_cfg)
    rates_b = measured_rate(y_b, fine_cfg)
    nonphysical_rows = []
    try:
        muller_correct(rates_b, tau)
        raised = False
    except NonPhysicalEstimateError as exc:
        raised = True
        over = np.flatnonzero(rates_b * tau >= 1.0)
        for m in over:
            nonphysical_rows.append(
                {
                    "bin_index": int(m),
                    "measured_rate_hz": rates_b[m],
                    "rate_times_tau": rates_b[m] * tau,
                    "pole_rate_hz": 1.0 / tau,
                    "error": str(exc),
                }
            )

    checks = (
        Check(
            "coarse_bin_underestimates_at_high_flux",
            rel_errors[-1] < -0.10,
            f"relative error at peak {peaks_hz[-1]:.0f} Hz is {rel_errors[-1]:+.3f}",
        ),
        Check(
            "coarse_bin_accurate_at_low_flux",
            abs(rel_errors[0]) < 0.05,
            f"relative error at peak {peaks_hz[0]:.0f} Hz is {rel_errors[0]:+.4f}",
        ),
        Check(
            "fine_bins_trigger_nonphysical_estimate",
            raised and len(nonphysical_rows) >= 1,
            f"{len(nonphysical_rows)} bin(s) at or beyond the correction pole",
        ),
    )
    return ScenarioReport(
        name="muller_violation",
        tables={"coarse_sweep": spec_rows, "nonphysical_bins": nonphysical_rows},
        checks=checks,
        runtime_seconds=time.time() - t0,
    )


# ---------------------------------------------------------------------------
# Scenario 2: Gaussian peak-rate sweep, deadtime vs Poisson fits
# ---------------------------------------------------------------------------

def run_gaussian_sweep(
    seed: int = 202,
    num_shots: int = 1_000_000,
    eval_shots: int = 4_000_000,
    peaks_hz: Sequence[float] = SWEEP_PEAKS_HZ,
    orders: Sequence[int] = range(0, 9),
    settings: OptimizerSettings = OptimizerSettings(),
) -> ScenarioReport:
    """Deadtime vs Poisson maximum-likelihood fits across flux regimes.

    Sweeps the Gaussian peak rate so the active fraction runs from ~0.99
    down to ~0.5, fits both models per point, and scores each against a
    shared low-flux evaluation dataset plus the known truth (relative RMSE).
    """
    t0 = time.time()
    eval_hist, eval_cfg = _narrow_eval_set(seed + 7777, eval_shots)
    cfg = narrow_pulse_config(num_shots)

    rows = []
    point = {}
    for i, peak in enumerate(peaks_hz):
        truth = narrow_pulse_flux(peak, cfg)
        data = simulate_dataset(truth, cfg, rng_seed=seed + i)
        y = build_count_histogram(data, cfg)
        z = build_active_histogram(data, cfg)
        af = active_fraction(z)
        truth_mean = float(np.mean(truth.rates))
        entry = {"af": af, "y": y, "truth": truth}
        for loss in ("deadtime", "poisson"):
            fit = cross_validate(data, cfg, loss, orders, settings)
            flux_fit = forward_flux(fit.model, cfg)
            e_loss = evaluation_loss(flux_fit, eval_hist, eval_cfg)
            rel_rmse = rmse(flux_fit, truth) / truth_mean
            entry[loss] = {
                "fit": fit,
                "flux": flux_fit,
                "eval_loss": e_loss,
                "rel_rmse": rel_rmse,
            }
            rows.append(
                {
                    "peak_rate_hz": peak,
                    "active_fraction": af,
                    "model": loss,
                    "selected_order": fit.selected,
                    "evaluation_loss": e_loss,
                    "relative_rmse": rel_rmse,
                    "fit_argmax_bin": int(np.argmax(flux_fit.rates)),
                    "detected_argmax_bin": int(np.argmax(y.counts)),
                    "truth_argmax_bin": int(np.argmax(truth.rates)),
                    "total_detections": int(y.counts.sum()),
                }
            )
        point[peak] = entry

    afs = {p: point[p]["af"] for p in peaks_hz}
    low_af = [p for p in peaks_hz if afs[p] < 0.85]
    ordering_ok = all(
        point[p]["deadtime"]["eval_loss"] < point[p]["poisson"]["eval_loss"]
        for p in low_af
    )
    dead_rmse = np.array([point[p]["deadtime"]["rel_rmse"] for p in peaks_hz])
    pois_rmse = np.array([point[p]["poisson"]["rel_rmse"] for p in peaks_hz])
    dead_ratio = float(dead_rmse.max() / dead_rmse.min())
    pois_ratio = float(pois_rmse.max() / pois_rmse.min())

    anchor = afs.get(100e6, float("nan"))
    top = point[peaks_hz[-1]]
    truth_argmax = int(np.argmax(top["truth"].rates))
    detected_argmax = int(np.argmax(top["y"].counts))
    dead_argmax = int(np.argmax(top["deadtime"]["flux"].rates))

    # Rank correlation is computed over the Poisson fits: they span the full
    # error range, whereas the deadtime fits are statistically tied near zero
    # error and would only contribute rank noise.
    pairs = np.array(
        [(point[p]["poisson"]["rel_rmse"], point[p]["poisson"]["eval_loss"]) for p in peaks_hz]
    )
    rho = float(stats.spearmanr(pairs[:, 0], pairs[:, 1]).statistic)

    runtime = time.time() - t0
    checks = (
        Check(
            "af_anchor_100mhz",
            abs(anchor - 0.94) <= 0.01,
            f"active fraction at 100 MHz peak is {anchor:.4f} (target 0.94 +/- 0.01)",
        ),
        Check(
            "deadtime_beats_poisson_below_af_085",
            bool(low_af) and ordering_ok,
            f"deadtime evaluation loss lower at all {len(low_af)} points with AF < 0.85",
        ),
        Check(
            "deadtime_rmse_stable",
            dead_ratio < 3.0,
            f"deadtime relative RMSE max/min ratio {dead_ratio:.2f} (< 3 required)",
        ),
        Check(
            "poisson_rmse_diverges",
            pois_ratio > 10.0,
            f"poisson relative RMSE max/min ratio {pois_ratio:.1f} (> 10 required)",
        ),
        Check(
            "first_photon_bias_at_top_flux",
            detected_argmax < truth_argmax,
            f"detected argmax bin {detected_argmax} precedes truth bin {truth_argmax}",
        ),
        Check(
            "deadtime_fit_restores_peak_position",
            abs(dead_argmax - truth_argmax) <= 2,
            f"deadtime fit argmax bin {dead_argmax} vs truth {truth_argmax}",
        ),
        Check(
            "rmse_eval_loss_monotone",
            rho > 0.9,
            f"Spearman rho between relative RMSE and evaluation loss is {rho:.3f}",
        ),
        Check(
            "runtime_bound",
            runtime < 1200.0,
            f"sweep completed in {runtime:.1f} s (< 1200 s required)",
        ),
    )
    return ScenarioReport(
        name="gaussian_sweep",
        tables={"sweep": rows},
        checks=checks,
        runtime_seconds=runtime,
    )


# ---------------------------------------------------------------------------
# Scenario 3: shot-noise study over short integration intervals
# ---------------------------------------------------------------------------

def run_shot_noise_study(
    seed: int = 303,
    peaks_hz: Sequence[float] = (100e6, 200e6, 400e6, 650e6, 1000e6),
    lengths: Sequence[int] = (250, 500, 1000, 2000),
    replicates: int = 12,
    eval_shots: int = 4_000_000,
    orders: Sequence[int] = range(0, 5),
    settings: OptimizerSettings = OptimizerSettings(),
    anchor_peak_hz: float = 650e6,
) -> ScenarioReport:
    """Replicate spread of the evaluation loss at very short integrations.

    For each flux point, fits 12 disjoint replicates at each integration
    length; the replicate standard deviation of the evaluation loss must
    fall monotonically with shot count, and the mean deadtime/Poisson
    curves must separate once the active fraction drops to ~0.8.
    """
    t0 = time.time()
    eval_hist, eval_cfg = _narrow_eval_set(seed + 7777, eval_shots)
    max_len = max(lengths)
    total_shots = replicates * max_len

    rows = []
    summary_rows = []
    stats_by_point = {}
    afs = {}
    for i, peak in enumerate(peaks_hz):
        cfg = narrow_pulse_config(total_shots)
        truth = narrow_pulse_flux(peak, cfg)
        data = simulate_dataset(truth, cfg, rng_seed=seed + i)
        af = active_fraction(build_active_histogram(data, cfg))
        afs[peak] = af
        for length in lengths:
            losses = {"deadtime": [], "poisson": []}
            for r in range(replicates):
                sub = data.select(np.arange(r * length, (r + 1) * length))
                sub_cfg = cfg.with_shots(length)
                for loss in ("deadtime", "poisson"):
                    fit = cross_validate(sub, sub_cfg, loss, orders, settings)
                    e_loss = evaluation_loss(
                        forward_flux(fit.model, sub_cfg), eval_hist, eval_cfg
                    )
                    losses[loss].append(e_loss)
                    rows.append(
                        {
                            "peak_rate_hz": peak,
                            "active_fraction": af,
                            "num_shots": length,
                            "replicate": r,
                            "model": loss,
                            "evaluation_loss": e_loss,
                            "selected_order": fit.selected,
                        }
                    )
            for loss in ("deadtime", "poisson"):
                arr = np.array(losses[loss])
                stats_by_point[(peak, length, loss)] = (
                    float(arr.mean()),
                    float(arr.std(ddof=1)),
                )
                summary_rows.append(
                    {
                        "peak_rate_hz": peak,
                        "active_fraction": af,
                        "num_shots": length,
                        "model": loss,
                        "mean_evaluation_loss": arr.mean(),
                        "std_evaluation_loss": arr.std(ddof=1),
                    }
                )

    anchor_stds = [
        stats_by_point[(anchor_peak_hz, length, "deadtime")][1] for length in lengths
    ]
    monotone = all(a > b for a, b in zip(anchor_stds, anchor_stds[1:]))

    longest = max(lengths)
    gaps = {
        peak: stats_by_point[(peak, longest, "poisson")][0]
        - stats_by_point[(peak, longest, "deadtime")][0]
        for peak in peaks_hz
    }
    low_af_peaks = [p for p in peaks_hz if afs[p] <= 0.8]
    high_af_peak = max(peaks_hz, key=lambda p: afs[p])
    separated = bool(low_af_peaks) and all(
        gaps[p] > 0 and gaps[p] > gaps[high_af_peak] for p in low_af_peaks
    )

    runtime = time.time() - t0
    checks = (
        Check(
            "replicate_std_monotone_in_shots",
            monotone,
            "anchor-point deadtime-fit evaluation-loss std by shots "
            + ", ".join(f"{n}:{s:.3g}" for n, s in zip(lengths, anchor_stds)),
        ),
        Check(
            "models_separate_below_af_08",
            separated,
            "poisson-minus-deadtime mean evaluation-loss gap "
            + ", ".join(f"AF {afs[p]:.2f}:{gaps[p]:.3g}" for p in peaks_hz),
        ),
        Check(
            "runtime_bound",
            runtime < 1200.0,
            f"study completed in {runtime:.1f} s",
        ),
    )
    return ScenarioReport(
        name="shot_noise_study",
        tables={"replicates": rows, "summary": summary_rows},
        checks=checks,
        runtime_seconds=runtime,
    )


# ---------------------------------------------------------------------------
# Scenario 4: extended structured pulse, spline fits vs corrected counts
# ---------------------------------------------------------------------------

EXTENDED_TAU = 53e-9
EXTENDED_BIN_WIDTH = 1e-9
EXTENDED_NUM_BINS = 1024
EXTENDED_PEAK_RATE = 300e6   # peak flux * deadtime ~ 16, far beyond the 1/tau limit


def extended_target_config(num_shots: int) -> DetectorConfig:
    return DetectorConfig(
        tau=EXTENDED_TAU,
        bin_width=EXTENDED_BIN_WIDTH,
        num_bins=EXTENDED_NUM_BINS,
        num_shots=num_shots,
    )


def structured_pulse_flux(peak_rate: float, config: DetectorConfig) -> FluxCurve:
    """A ~1-us laser pulse with amplifier-mode structure.

    Smooth onset ramp (slower than the deadtime), an oscillating plateau
    with ~80-ns period, a decay into a quiet gap longer than twice the
    deadtime, and an isolated weak spike after the gap.  Quiet level is
    0.2% of the peak so the log-domain spline stays finite everywhere.
    """
    t = (bin_edges(config)[:-1] - config.window_start) / 1e-9   # ns
    quiet = 0.002
    shape = np.full_like(t, quiet)

    ramp = (t >= 60) & (t < 180)
    shape[ramp] = quiet + (1.0 - quiet) * 0.5 * (1 - np.cos(np.pi * (t[ramp] - 60) / 120))

    plateau = (t >= 180) & (t < 560)
    shape[plateau] = 0.65 + 0.35 * np.cos(2 * np.pi * (t[plateau] - 180) / 80)

    decay = (t >= 560) & (t < 640)
    level = 0.65    # plateau value at 560 ns (cosine completes 4.75 cycles)
    shape[decay] = 0.02 + (level - 0.02) * 0.5 * (1 + np.cos(np.pi * (t[decay] - 560) / 80))

    late = t >= 640
    shape[late] = 0.02 + 0.35 * np.exp(-((t[late] - 780.0) ** 2) / (2.0 * 8.0**2))

    return FluxCurve.from_rates(peak_rate * shape, config.bin_width)


def _muller_pseudo_counts(data, config: DetectorConfig):
    """Per-bin corrected pseudo-counts, or None when the correction has no solution."""
    cfg = config.with_shots(data.num_shots)
    y = build_count_histogram(data, cfg)
    rates = measured_rate(y, cfg)
    corrected = muller_correct(rates, config.tau)
    return corrected * data.num_shots * config.bin_width


def run_extended_target(
    seed: int = 404,
    num_shots: int = 320_000,
    eval_shots: int = 3_200_000,
    ods: Sequence[float] = (0.0, 0.3, 1.0, 3.0),
    eval_od: float = 4.0,
    max_depth: int = 5,
    settings: OptimizerSettings = OptimizerSettings(),
) -> ScenarioReport:
    """Spline estimation of a structured extended pulse across attenuations.

    At each optical density the deadtime spline fit is compared against a
    spline fit to closed-form-corrected pseudo-counts, both scored on the
    heavily attenuated evaluation dataset.  The corrected route must fail
    with a non-physical estimate at the two brightest settings and lose on
    evaluation loss wherever it is computable.
    """
    t0 = time.time()
    cfg = extended_target_config(num_shots)
    base_flux = structured_pulse_flux(EXTENDED_PEAK_RATE, cfg)

    eval_cfg = extended_target_config(eval_shots)
    eval_flux = attenuate(structured_pulse_flux(EXTENDED_PEAK_RATE, eval_cfg),
                          AttenuationSpec.from_od(eval_od))
    eval_data = simulate_dataset(eval_flux, eval_cfg, rng_seed=seed + 9999)
    eval_hist = build_count_histogram(eval_data, eval_cfg)

    rows = []
    results = {}
    for i, od in enumerate(ods):
        flux = attenuate(base_flux, AttenuationSpec.from_od(od))
        data = simulate_dataset(flux, cfg, rng_seed=seed + i)
        y = build_count_histogram(data, cfg)
        af = active_fraction(build_active_histogram(data, cfg))
        max_occupancy = float(np.max(measured_rate(y, cfg)) * cfg.tau)

        dead_fit = trim_spline_knots(data, cfg, "deadtime", max_depth, settings)
        dead_eval = evaluation_loss(forward_flux(dead_fit.model, cfg), eval_hist, eval_cfg)

        fit_set, val_set = thin_alternating(data)
        try:
            pseudo_f = _muller_pseudo_counts(fit_set, cfg)
            pseudo_v = _muller_pseudo_counts(val_set, cfg)
            ones = np.ones(cfg.num_bins)
            muller_fit = _trim_on_histograms(
                pseudo_f, ones, fit_set.num_shots,
                pseudo_v, ones, val_set.num_shots,
                cfg, "poisson", max_depth, settings,
            )
            muller_eval = evaluation_loss(
                forward_flux(muller_fit.model, cfg), eval_hist, eval_cfg
            )
            computable = True
        except NonPhysicalEstimateError:
            muller_fit = None
            muller_eval = float("nan")
            computable = False

        results[od] = {
            "computable": computable,
            "dead_eval": dead_eval,
            "muller_eval": muller_eval,
        }
        rows.append(
            {
                "optical_density": od,
                "active_fraction": af,
                "max_rate_times_tau": max_occupancy,
                "deadtime_eval_loss": dead_eval,
                "muller_computable": computable,
                "muller_eval_loss": muller_eval,
                "deadtime_intervals": dead_fit.diagnostics["n_intervals"],
                "muller_intervals": (
                    muller_fit.diagnostics["n_intervals"] if computable else -1
                ),
                "total_detections": int(y.counts.sum()),
            }
        )

    fails = [od for od in ods if not results[od]["computable"]]
    computable = [od for od in ods if results[od]["computable"]]
    dominance = bool(computable) and all(
        results[od]["dead_eval"] < results[od]["muller_eval"] for od in computable
    )

    runtime = time.time() - t0
    checks = (
        Check(
            "correction_nonphysical_at_bright_settings",
            fails == [od for od in ods if od < 0.5],
            f"non-physical at OD {fails}; computable at OD {computable}",
        ),
        Check(
            "deadtime_beats_corrected_fit_when_computable",
            dominance,
            "; ".join(
                f"OD {od}: deadtime {results[od]['dead_eval']:.2f} vs "
                f"corrected {results[od]['muller_eval']:.2f}"
                for od in computable
            ),
        ),
        Check(
            "runtime_bound",
            runtime < 1200.0,
            f"scenario completed in {runtime:.1f} s",
        ),
    )
    return ScenarioReport(
        name="extended_target",
        tables={"attenuation_sweep": rows},
        checks=checks,
        runtime_seconds=runtime,
    )


SCENARIOS: Dict[str, Callable[..., ScenarioReport]] = {
    "muller-violation": run_muller_violation,
    "gaussian-sweep": run_gaussian_sweep,
    "shot-noise-study": run_shot_noise_study,
    "extended-target": run_extended_target,
}


def run_scenario(name: str, out_dir=None, **kwargs) -> ScenarioReport:
    """Run a named scenario and optionally write its tables and summary."""
    if name not in SCENARIOS:
        raise KeyError(
            f"unknown scenario {name!r}; available: {', '.join(sorted(SCENARIOS))}"
        )
    report = SCENARIOS[name](**kwargs)
    if out_dir is not None:
        report.write(out_dir)
    return report
