"""Experiment protocols: single runs, method comparison, window sweep, refit A/B."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from ..predictor import ArModel, PredictorConfig
from ..simulator import METHODS, RunConfig, RunRecord, Scenario, make_scenario, physics_trace, reference_oracle, run
from ..wrench import Trace, write_rows
from .metrics import MetricReport, anova_f, metric_report, rms_error, squared_errors, write_reports

logger = logging.getLogger(__name__)

# the bundled regime-switching scenario: peg contacts switch on and off as it is pushed around
REGIME_SCENARIO = "peg_contact"


def replay_predictor(values: np.ndarray, config: PredictorConfig) -> tuple[np.ndarray, int | None]:
    """One-step predictions over a physics-rate stream.

    Row k of the result predicts sample k from samples 0..k-1 (row 0 is NaN).
    Also returns the index of the first sample ingested with a refit, if any.
    """
    model = ArModel(config)
    n = len(values)
    pred = np.full((n, 6), np.nan)
    first_refit = None
    depth = max(config.p_max, config.order, len(config.default_phi)) + 1
    for k in range(n - 1):
        report = model.ingest(values[k])
        if report.refit and first_refit is None:
            first_refit = k
        pred[k + 1] = model.predict_array(values[max(0, k + 1 - depth) : k + 1])
    return pred, first_refit


def prediction_squared_errors(values: np.ndarray, pred: np.ndarray, start: int) -> np.ndarray:
    return np.sum((pred[start:, :3] - values[start:, :3]) ** 2, axis=1)


def simulate(scenario: Scenario, config: RunConfig, out_dir=None) -> RunRecord:
    record = run(scenario, config)
    if out_dir is not None:
        record.write(out_dir)
    return record


def analysis_start(scenario: Scenario, records: dict[str, RunRecord]) -> float:
    """Comparison interval start: the scenario's own start, and after the adaptive warmup."""
    start = scenario.analysis_start_ms
    adaptive = records.get("adaptive_prediction")
    if adaptive is not None and adaptive.first_refit_ms is not None:
        start = max(start, adaptive.first_refit_ms)
    return start


@dataclass
class Comparison:
    records: dict[str, RunRecord]
    oracle: Trace
    reports: dict[str, MetricReport]
    start_ms: float


def compare(scenario: Scenario, predictor: PredictorConfig | None = None, methods: Sequence[str] = METHODS, out_dir=None) -> Comparison:
    predictor = predictor or PredictorConfig()
    tape: dict = {}
    physics_trace(scenario, tape)
    records = {m: run(scenario, RunConfig(method=m, predictor=predictor), tape) for m in methods}
    oracle = reference_oracle(scenario)
    start = analysis_start(scenario, records)
    baseline = records["no_prediction"].haptic if "no_prediction" in records else None
    reports = {}
    for m, rec in records.items():
        reports[m] = metric_report(rec.haptic, oracle, start, baseline if m != "no_prediction" else None)
    if out_dir is not None:
        out = Path(out_dir)
        for m, rec in records.items():
            rec.haptic.write_csv(out / f"{m}_haptic.csv")
        records[methods[0]].physics.write_csv(out / "physics.csv")
        oracle.write_csv(out / "oracle.csv")
        write_reports(out / "metrics.csv", reports, start)
    return Comparison(records, oracle, reports, start)


def sweep_window(
    sizes: Sequence[int] = (100, 200, 300, 400, 500),
    seed: int = 7,
    scenario: str = REGIME_SCENARIO,
    duration_ms: float = 40000.0,
    predictor: PredictorConfig | None = None,
    out_dir=None,
    stream: Trace | None = None,
) -> list[tuple[int, float]]:
    """One-step force prediction RMS for each window size on one shared stream.

    Every size is scored on the same samples, those after the largest window fills.
    """
    predictor = predictor or PredictorConfig()
    if stream is None:
        stream = physics_trace(make_scenario(scenario, seed, duration_ms=duration_ms))
    values = stream.values
    start = max(sizes) + 1
    if start >= len(values):
        raise ValueError(f"stream of {len(values)} samples is too short for window {max(sizes)}")
    rows = []
    for size in sizes:
        pred, _ = replay_predictor(values, replace(predictor, window_size=int(size)))
        rows.append((int(size), float(np.sqrt(np.mean(prediction_squared_errors(values, pred, start))))))
        logger.info("window %d: rms %.5f", size, rows[-1][1])
    if out_dir is not None:
        write_rows(Path(out_dir) / "sweep_window.csv", ("window_size", "rms"), rows)
    return rows


AB_HEADER = ("seed", "rms_without_update", "rms_with_update", "anova_f", "haptic_rms_without_update", "haptic_rms_with_update")


@dataclass
class AbResult:
    rows: list[tuple[float, ...]]
    pooled_f: float

    @property
    def win_fraction(self) -> float:
        return float(np.mean([r[2] < r[1] for r in self.rows]))


def ab_update(
    seeds: Sequence[int] = tuple(range(20)),
    scenario: str = REGIME_SCENARIO,
    duration_ms: float | None = None,
    predictor: PredictorConfig | None = None,
    haptic: bool = False,
    mass: float | None = None,
    out_dir=None,
) -> AbResult:
    """Refit vs frozen default coefficients on each seed's physics stream.

    Per seed: one-step force prediction RMS of both predictors on the samples
    after the first refit, and the ANOVA F on their per-sample squared errors.
    With ``haptic`` the rendered 1 kHz output of both is also scored against the
    reference oracle.
    """
    predictor = predictor or PredictorConfig()
    frozen = replace(predictor, adaptive=False)
    rows = []
    pooled_with, pooled_without = [], []
    for seed in seeds:
        sc = make_scenario(scenario, seed, mass=mass, duration_ms=duration_ms)
        tape: dict = {}
        stream = physics_trace(sc, tape)
        values = stream.values
        pred_a, first = replay_predictor(values, predictor)
        if first is None:
            raise ValueError(f"seed {seed}: stream of {len(values)} samples never fills the window")
        pred_f, _ = replay_predictor(values, frozen)
        start = first + 1
        e_with = prediction_squared_errors(values, pred_a, start)
        e_without = prediction_squared_errors(values, pred_f, start)
        pooled_with.append(e_with)
        pooled_without.append(e_without)
        h_without = h_with = float("nan")
        if haptic:
            oracle = reference_oracle(sc)
            t0 = float(stream.t[first])
            recs = {m: run(sc, RunConfig(method=m, predictor=predictor), tape) for m in ("fixed_coefficients", "adaptive_prediction")}
            ref = oracle.window(t0)
            h_without = rms_error(recs["fixed_coefficients"].haptic.window(t0), ref)
            h_with = rms_error(recs["adaptive_prediction"].haptic.window(t0), ref)
        rows.append(
            (
                seed,
                float(np.sqrt(e_without.mean())),
                float(np.sqrt(e_with.mean())),
                anova_f(e_with, e_without),
                h_without,
                h_with,
            )
        )
        logger.info("seed %d: without %.4f with %.4f F %.2f", seed, rows[-1][1], rows[-1][2], rows[-1][3])
    result = AbResult(rows, anova_f(np.concatenate(pooled_with), np.concatenate(pooled_without)))
    if out_dir is not None:
        out = Path(out_dir)
        write_rows(out / "ab_update.csv", AB_HEADER, rows)
        write_rows(out / "ab_update_pooled.csv", ("pooled_anova_f", "win_fraction"), [(result.pooled_f, result.win_fraction)])
    return result


def recompute_metrics(candidate: Trace, reference: Trace, start_ms: float = 0.0) -> MetricReport:
    return metric_report(candidate, reference, start_ms)


__all__ = [
    "AbResult",
    "Comparison",
    "REGIME_SCENARIO",
    "ab_update",
    "analysis_start",
    "compare",
    "prediction_squared_errors",
    "recompute_metrics",
    "replay_predictor",
    "simulate",
    "squared_errors",
    "sweep_window",
]
