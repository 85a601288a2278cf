"""Accuracy and smoothness metrics over wrench traces."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from ..wrench import Trace, format_float


def _aligned(candidate: Trace, reference: Trace) -> None:
    if len(candidate) != len(reference) or not np.allclose(candidate.t, reference.t, rtol=0.0, atol=1e-9):
        raise ValueError("candidate and reference traces are not on a common timeline")


def rms_error(candidate: Trace, reference: Trace) -> float:
    """sqrt(mean ||F_cand - F_ref||²) over force vectors, in N."""
    _aligned(candidate, reference)
    if not len(candidate):
        raise ValueError("empty traces")
    return float(np.sqrt(np.mean(np.sum((candidate.force - reference.force) ** 2, axis=1))))


def rms_torque_error(candidate: Trace, reference: Trace) -> float:
    _aligned(candidate, reference)
    if not len(candidate):
        raise ValueError("empty traces")
    return float(np.sqrt(np.mean(np.sum((candidate.torque - reference.torque) ** 2, axis=1))))


def squared_errors(candidate: Trace, reference: Trace) -> np.ndarray:
    _aligned(candidate, reference)
    return np.sum((candidate.force - reference.force) ** 2, axis=1)


def smoothness_metrics(trace: Trace) -> tuple[float, float]:
    """(max ||ΔF|| between consecutive samples in N, mean ||Δ²F||/Δt² in N/ms²)."""
    if len(trace) < 3:
        raise ValueError("need at least 3 samples")
    f = trace.force
    jump = float(np.max(np.linalg.norm(np.diff(f, axis=0), axis=1)))
    dt = np.diff(trace.t)
    dt2 = dt[1:] * dt[:-1]
    jerk = np.linalg.norm(f[2:] - 2.0 * f[1:-1] + f[:-2], axis=1) / dt2
    return jump, float(np.mean(jerk))


def anova_f(group_a, group_b) -> float:
    """Two-group one-way ANOVA F statistic (between / within mean square)."""
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each group needs at least 2 values")
    grand = np.concatenate([a, b]).mean()
    ss_between = len(a) * (a.mean() - grand) ** 2 + len(b) * (b.mean() - grand) ** 2
    ss_within = np.sum((a - a.mean()) ** 2) + np.sum((b - b.mean()) ** 2)
    df_within = len(a) + len(b) - 2
    if ss_within == 0.0:
        return math.inf if ss_between > 0.0 else 0.0
    return float(ss_between / (ss_within / df_within))


METRIC_HEADER = ("rms_force_error", "rms_torque_error", "max_interframe_jump", "mean_abs_jerk", "anova_f")


@dataclass
class MetricReport:
    rms_force_error: float
    rms_torque_error: float
    max_interframe_jump: float
    mean_abs_jerk: float
    anova_f: float = math.nan

    def as_row(self) -> list[float]:
        return [getattr(self, f.name) for f in fields(self)]

    def to_dict(self) -> dict:
        return asdict(self)


def metric_report(candidate: Trace, reference: Trace, start_ms: float = 0.0, baseline: Trace | None = None) -> MetricReport:
    """Metrics of ``candidate`` against ``reference`` over t >= start_ms.

    When ``baseline`` is given, ``anova_f`` compares per-sample squared errors
    of candidate and baseline.
    """
    c = candidate.window(start_ms)
    r = reference.window(start_ms)
    jump, jerk = smoothness_metrics(c)
    f = math.nan
    if baseline is not None:
        f = anova_f(squared_errors(c, r), squared_errors(baseline.window(start_ms), r))
    return MetricReport(rms_error(c, r), rms_torque_error(c, r), jump, jerk, f)


def write_reports(path, reports: dict[str, MetricReport], start_ms: float) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("method", "analysis_start_ms", *METRIC_HEADER))
        for name, rep in reports.items():
            w.writerow([name, format_float(start_ms), *(format_float(v) for v in rep.as_row())])


def read_reports(path) -> tuple[dict[str, MetricReport], float]:
    out = {}
    start = 0.0
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            start = float(row["analysis_start_ms"])
            out[row["method"]] = MetricReport(*(float(row[k]) for k in METRIC_HEADER))
    return out, start
