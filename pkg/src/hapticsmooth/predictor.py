"""Online AR(p) force/torque prediction with sliding-window Yule-Walker refits.

Each of the six wrench axes gets its own scalar AR model. Samples are
mean-centered against the window mean before estimating correlations and the
mean is added back at prediction time, so a constant signal is predicted
exactly whatever the coefficients are.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .wrench import TimedWrench, Wrench, format_float

logger = logging.getLogger(__name__)

AXES = ("fx", "fy", "fz", "tx", "ty", "tz")

DivisorMode = Literal["paper_literal_N_minus_1", "biased_N"]
DIVISOR_MODES = ("paper_literal_N_minus_1", "biased_N")

# c0 below this fraction of max(1, mean²) counts as a constant signal
_DEGENERATE_REL = 1e-24


class NotReadyError(RuntimeError):
    """Raised when an estimate needs a full window."""


class DegenerateSignalError(ArithmeticError):
    """Raised when a window carries no variance to fit against."""


class SlidingWindow:
    """Fixed-capacity FIFO of scalar samples."""

    def __init__(self, capacity: int = 300):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self._buf: deque[float] = deque(maxlen=self.capacity)

    def push(self, x: float) -> None:
        self._buf.append(float(x))

    def extend(self, xs) -> None:
        for x in xs:
            self.push(x)

    @property
    def count(self) -> int:
        return len(self._buf)

    @property
    def full(self) -> bool:
        return len(self._buf) == self.capacity

    def values(self) -> np.ndarray:
        return np.fromiter(self._buf, dtype=float, count=len(self._buf))

    def mean(self) -> float:
        return float(self.values().mean()) if self._buf else 0.0

    def __len__(self) -> int:
        return len(self._buf)

    @classmethod
    def of(cls, xs, capacity: int | None = None) -> SlidingWindow:
        xs = list(xs)
        w = cls(capacity or len(xs))
        w.extend(xs)
        return w


def _divisor(n: int, mode: str) -> float:
    if mode == "paper_literal_N_minus_1":
        return float(n - 1)
    if mode == "biased_N":
        return float(n)
    raise ValueError(f"unknown divisor mode {mode!r}")


def _require_full(window: SlidingWindow) -> np.ndarray:
    if not window.full:
        raise NotReadyError(f"window holds {window.count} of {window.capacity} samples")
    return window.values()


def _autocovariances(x: np.ndarray, max_lag: int, mode: str) -> np.ndarray:
    xc = x - x.mean()
    n = len(xc)
    div = _divisor(n, mode)
    return np.array([np.dot(xc[: n - k], xc[k:]) / div for k in range(max_lag + 1)])


def autocovariance(window: SlidingWindow, lag: int, divisor_mode: DivisorMode = "paper_literal_N_minus_1") -> float:
    """Lag-``lag`` autocovariance of the mean-centered window contents."""
    x = _require_full(window)
    if not 0 <= lag < len(x):
        raise ValueError(f"lag {lag} out of range for window of {len(x)}")
    xc = x - x.mean()
    return float(np.dot(xc[: len(xc) - lag], xc[lag:]) / _divisor(len(xc), divisor_mode))


@dataclass(frozen=True)
class YuleWalkerSystem:
    c: np.ndarray  # autocovariances c0..cp
    r: np.ndarray  # autocorrelations r1..rp
    R: np.ndarray  # p x p Toeplitz, unit diagonal
    rhs: np.ndarray

    @property
    def order(self) -> int:
        return len(self.rhs)


def yule_walker_from_autocov(c: np.ndarray, scale: float = 1.0) -> YuleWalkerSystem:
    """Assemble the Toeplitz system from autocovariances c0..cp."""
    c = np.asarray(c, dtype=float)
    p = len(c) - 1
    if p < 1:
        raise ValueError("need at least lag 1")
    if not c[0] > _DEGENERATE_REL * max(1.0, scale):
        raise DegenerateSignalError(f"zero-variance window (c0={c[0]!r})")
    rho = c / c[0]
    idx = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    R = rho[idx]
    r = rho[1:].copy()
    return YuleWalkerSystem(c=c, r=r, R=R, rhs=r.copy())


def build_yule_walker(window: SlidingWindow, p: int, divisor_mode: DivisorMode = "paper_literal_N_minus_1") -> YuleWalkerSystem:
    x = _require_full(window)
    if not 1 <= p < len(x):
        raise ValueError(f"order {p} out of range for window of {len(x)}")
    c = _autocovariances(x, p, divisor_mode)
    return yule_walker_from_autocov(c, scale=float(x.mean()) ** 2)


@dataclass(frozen=True)
class ArCoefficients:
    order: int
    phi: tuple[float, ...]
    residual_variance: float = 0.0

    def __post_init__(self):
        if len(self.phi) != self.order:
            raise ValueError("phi length must equal order")
        if not np.all(np.isfinite(self.phi)) or not np.isfinite(self.residual_variance):
            raise ValueError("non-finite coefficients")

    @classmethod
    def from_phi(cls, phi: Sequence[float], residual_variance: float = 0.0) -> ArCoefficients:
        phi = tuple(float(v) for v in phi)
        return cls(len(phi), phi, residual_variance)


def solve_coefficients(system: YuleWalkerSystem, ridge_lambda: float = 1e-8) -> ArCoefficients:
    """Least-squares solution of the (ridge-regularized) Yule-Walker system."""
    p = system.order
    A = system.R + ridge_lambda * np.eye(p)
    try:
        phi = np.linalg.solve(A, system.rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSignalError(str(exc)) from exc
    if not np.all(np.isfinite(phi)):
        raise DegenerateSignalError("non-finite AR coefficients")
    sigma2 = max(0.0, float(system.c[0] * (1.0 - np.dot(phi, system.rhs))))
    return ArCoefficients(p, tuple(float(v) for v in phi), sigma2)


def fpe(residual_variance: float, n: int, p: int) -> float:
    return residual_variance * (n + p + 1) / (n - p - 1)


def _fpe_scores(c: np.ndarray, n: int, p_max: int, ridge_lambda: float, scale: float) -> np.ndarray:
    scores = np.empty(p_max)
    for p in range(1, p_max + 1):
        coef = solve_coefficients(yule_walker_from_autocov(c[: p + 1], scale), ridge_lambda)
        scores[p - 1] = fpe(coef.residual_variance, n, p)
    return scores


def select_order_fpe(
    window: SlidingWindow,
    p_max: int = 8,
    divisor_mode: DivisorMode = "paper_literal_N_minus_1",
    ridge_lambda: float = 1e-8,
) -> int:
    """Order in 1..p_max minimizing the final prediction error; ties go to the smaller order."""
    x = _require_full(window)
    if p_max < 1 or p_max >= len(x) - 1:
        raise ValueError(f"p_max {p_max} out of range")
    c = _autocovariances(x, p_max, divisor_mode)
    scores = _fpe_scores(c, len(x), p_max, ridge_lambda, float(x.mean()) ** 2)
    return int(np.argmin(scores)) + 1  # argmin returns the first minimum


@dataclass
class PredictorConfig:
    window_size: int = 300
    order: int = 2
    order_auto: bool = False
    p_max: int = 8
    default_phi: tuple[float, ...] = (2.0, -1.0)
    ridge_lambda: float = 1e-8
    divisor_mode: DivisorMode = "paper_literal_N_minus_1"
    refit_interval: int = 1
    reselect_every: int = 10
    shared_coefficients: bool = False
    # False freezes default_phi for the whole run
    adaptive: bool = True
    dump_path: str | None = None

    def __post_init__(self):
        self.default_phi = tuple(float(v) for v in self.default_phi)
        if self.window_size < 2:
            raise ValueError("window_size must be at least 2")
        if not self.default_phi:
            raise ValueError("default_phi must not be empty")
        if self.divisor_mode not in DIVISOR_MODES:
            raise ValueError(f"unknown divisor mode {self.divisor_mode!r}")
        if self.refit_interval < 1 or self.reselect_every < 1:
            raise ValueError("refit_interval and reselect_every must be positive")
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be non-negative")
        if self.order_auto:
            if not 1 <= self.p_max < self.window_size - 1:
                raise ValueError("p_max must be below window_size - 1")
        elif not 1 <= self.order < self.window_size - 1:
            raise ValueError("order must be below window_size - 1")


@dataclass(frozen=True)
class RefitReport:
    tick: int
    refit: bool
    order: int | None = None
    residual_variances: tuple[float, ...] = ()
    degenerate_axes: tuple[str, ...] = ()
    order_reselected: bool = False


def _as_matrix(history) -> np.ndarray:
    if isinstance(history, np.ndarray):
        return history.reshape(-1, 6)
    rows = [h.wrench.to_array() if isinstance(h, TimedWrench) else (h.to_array() if isinstance(h, Wrench) else np.asarray(h)) for h in history]
    return np.array(rows, dtype=float).reshape(-1, 6)


def _predict_axis(x: np.ndarray, phi: Sequence[float], mean: float) -> float:
    """x holds the history oldest-first; phi[0] multiplies the newest sample."""
    p = len(phi)
    recent = x[::-1][:p] - mean
    return mean + float(np.dot(phi, recent))


class ArModel:
    """Six independent AR predictors fed by the physics-rate wrench stream."""

    def __init__(self, config: PredictorConfig | None = None):
        self.config = config or PredictorConfig()
        cfg = self.config
        self.windows = [SlidingWindow(cfg.window_size) for _ in AXES]
        self.coefficients: list[ArCoefficients | None] = [None] * len(AXES)
        self.means = [0.0] * len(AXES)
        self.order: int | None = None
        self.ticks = 0
        self.refits = 0
        self._dump_path = Path(cfg.dump_path) if cfg.dump_path else None
        if self._dump_path is not None:
            self._dump_path.parent.mkdir(parents=True, exist_ok=True)
            self._dump_path.write_text("axis,p,phi_1..phi_p,residual_variance\n", encoding="utf-8")

    @property
    def fitted(self) -> bool:
        return any(c is not None for c in self.coefficients)

    def phi(self, axis: int) -> tuple[float, ...]:
        c = self.coefficients[axis]
        return c.phi if c is not None else self.config.default_phi

    def _select_order(self, xs: list[np.ndarray]) -> int:
        cfg = self.config
        total = np.zeros(cfg.p_max)
        used = 0
        for x in xs:
            c = _autocovariances(x, cfg.p_max, cfg.divisor_mode)
            try:
                scores = _fpe_scores(c, len(x), cfg.p_max, cfg.ridge_lambda, float(x.mean()) ** 2)
            except DegenerateSignalError:
                continue
            total += scores / c[0]
            used += 1
        if not used:
            return self.order or cfg.order
        return int(np.argmin(total)) + 1

    def _fit_order(self, xs: list[np.ndarray], p: int) -> tuple[list[ArCoefficients | None], list[str]]:
        cfg = self.config
        out: list[ArCoefficients | None] = [None] * len(AXES)
        bad: list[str] = []
        if cfg.shared_coefficients:
            for group in ((0, 1, 2), (3, 4, 5)):
                c = sum(_autocovariances(xs[a], p, cfg.divisor_mode) for a in group)
                scale = sum(float(xs[a].mean()) ** 2 for a in group)
                try:
                    coef = solve_coefficients(yule_walker_from_autocov(c, scale), cfg.ridge_lambda)
                except DegenerateSignalError:
                    bad.extend(AXES[a] for a in group)
                    continue
                for a in group:
                    out[a] = coef
            return out, bad
        for a, x in enumerate(xs):
            try:
                c = _autocovariances(x, p, cfg.divisor_mode)
                out[a] = solve_coefficients(yule_walker_from_autocov(c, float(x.mean()) ** 2), cfg.ridge_lambda)
            except DegenerateSignalError:
                bad.append(AXES[a])
        return out, bad

    def refit(self) -> RefitReport:
        cfg = self.config
        xs = [w.values() for w in self.windows]
        self.means = [float(x.mean()) for x in xs]
        reselected = False
        if self.order is None:
            self.order = self._select_order(xs) if cfg.order_auto else cfg.order
            reselected = cfg.order_auto
        elif cfg.order_auto and self.refits % cfg.reselect_every == 0:
            self.order = self._select_order(xs)
            reselected = True
        fits, bad = self._fit_order(xs, self.order)
        for a, coef in enumerate(fits):
            if coef is not None:
                self.coefficients[a] = coef
            # degenerate axes keep previous coefficients, or default_phi if none
        self.refits += 1
        if bad:
            logger.debug("tick %d: degenerate axes %s keep previous coefficients", self.ticks, bad)
        if self._dump_path is not None:
            self._dump()
        return RefitReport(
            tick=self.ticks,
            refit=True,
            order=self.order,
            residual_variances=tuple(c.residual_variance if c is not None else float("nan") for c in self.coefficients),
            degenerate_axes=tuple(bad),
            order_reselected=reselected,
        )

    def _dump(self) -> None:
        with open(self._dump_path, "a", encoding="utf-8", newline="") as fh:
            for name, c in zip(AXES, self.coefficients):
                if c is None:
                    continue
                row = [name, str(c.order), *(format_float(v) for v in c.phi), format_float(c.residual_variance)]
                fh.write(",".join(row) + "\n")

    def ingest(self, sample) -> RefitReport:
        """Push one simulated wrench and refit when the window is full and due."""
        v = sample.wrench.to_array() if isinstance(sample, TimedWrench) else _as_matrix([sample])[0]
        for w, x in zip(self.windows, v):
            w.push(x)
        self.ticks += 1
        if self.config.adaptive and self.windows[0].full and self.ticks % self.config.refit_interval == 0:
            return self.refit()
        return RefitReport(tick=self.ticks, refit=False, order=self.order)

    def predict(self, history) -> Wrench:
        return Wrench.from_array(self.predict_array(_as_matrix(history)))

    def predict_array(self, history: np.ndarray) -> np.ndarray:
        """One-step prediction from an (k, 6) history, oldest row first."""
        k = len(history)
        if k == 0:
            raise ValueError("empty history")
        out = np.empty(6)
        for a in range(6):
            x = history[:, a]
            c = self.coefficients[a]
            if c is not None and k >= c.order:
                out[a] = _predict_axis(x, c.phi, self.means[a])
                continue
            phi = self.config.default_phi
            if k >= len(phi):
                out[a] = _predict_axis(x, phi, float(x[-len(phi):].mean()))
            else:
                out[a] = x[-1]
        return out


def ingest_and_maybe_refit(model: ArModel, sample: TimedWrench) -> RefitReport:
    return model.ingest(sample)


def predict_next(model: ArModel, history: Sequence[TimedWrench]) -> Wrench:
    return model.predict(history)
