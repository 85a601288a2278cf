from .experiments import ab_update, compare, replay_predictor, simulate, sweep_window
from .metrics import MetricReport, anova_f, metric_report, read_reports, rms_error, smoothness_metrics, write_reports

__all__ = [
    "MetricReport",
    "ab_update",
    "anova_f",
    "compare",
    "metric_report",
    "read_reports",
    "replay_predictor",
    "rms_error",
    "simulate",
    "smoothness_metrics",
    "sweep_window",
    "write_reports",
]
