"""Physics / prediction / haptic loops on a shared virtual clock."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from ..interpolator import PeriodEstimator, SplineControlWindow, UpsampleState, advance_array, compute_n
from ..predictor import ArModel, PredictorConfig
from ..wrench import Trace, write_rows
from .clock import HAPTIC, PHYSICS, PREDICTION, Mailbox, VirtualClock
from .physics import PhysicsWorld
from .scenarios import Scenario

logger = logging.getLogger(__name__)

METHODS = ("no_prediction", "fixed_coefficients", "adaptive_prediction")
META_HEADER = ("t_ms", "physics_period_ms", "contact_count", "displacement_m")
TOOL_HEADER = ("t_ms", "separation_m", "travel_m")


@dataclass
class RunConfig:
    method: str = "adaptive_prediction"
    predictor: PredictorConfig = field(default_factory=PredictorConfig)
    n_max: int = 100
    period_alpha: float = 0.5
    initial_period_ms: float = 10.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")

    def predictor_config(self) -> PredictorConfig:
        if self.method == "fixed_coefficients" and self.predictor.adaptive:
            from dataclasses import replace

            return replace(self.predictor, adaptive=False)
        return self.predictor


@dataclass
class RunRecord:
    scenario: str
    method: str
    haptic: Trace
    physics: Trace
    prediction: Trace
    t_ms: np.ndarray
    physics_period_ms: np.ndarray
    contact_count: np.ndarray
    displacement_m: np.ndarray
    travel_m: np.ndarray
    starved_ticks: int = 0
    first_refit_ms: float | None = None

    def write(self, out_dir, prefix: str = "") -> list[Path]:
        out = Path(out_dir)
        paths = [out / f"{prefix}{name}.csv" for name in ("haptic", "physics", "prediction", "meta", "tool")]
        self.haptic.write_csv(paths[0])
        self.physics.write_csv(paths[1])
        self.prediction.write_csv(paths[2])
        write_rows(paths[3], META_HEADER, np.column_stack([self.t_ms, self.physics_period_ms, self.contact_count, self.displacement_m]))
        write_rows(paths[4], TOOL_HEADER, np.column_stack([self.t_ms, self.displacement_m, self.travel_m]))
        return paths

    @property
    def physics_rate_hz(self) -> np.ndarray:
        return 1000.0 / self.physics_period_ms


def haptic_times(scenario: Scenario) -> np.ndarray:
    dt = 1000.0 / scenario.haptic_rate_hz
    return np.arange(int(round(scenario.duration_ms / dt))) * dt


def run(scenario: Scenario, config: RunConfig | None = None, tape: dict | None = None) -> RunRecord:
    """Execute the three loops until ``scenario.duration_ms`` and collect every stream.

    ``tape`` caches physics observations by tick time; passing the same dict to
    several runs of one scenario replays identical physics without re-integrating.
    """
    config = config or RunConfig()
    method = config.method
    clock = VirtualClock()
    world = PhysicsWorld(scenario)
    model = ArModel(config.predictor_config()) if method != "no_prediction" else None
    physics_box: Mailbox = Mailbox()
    haptic_box: Mailbox = Mailbox()
    estimator = PeriodEstimator(config.period_alpha)
    history: deque[np.ndarray] = deque(maxlen=64)

    phys_t, phys_v, periods, counts, seps, travel = [], [], [], [], [], []
    pred_t, pred_v = [], []
    h_times = haptic_times(scenario)
    h_out = np.empty((len(h_times), 6))
    first_refit = None
    starved = 0

    # haptic-loop private state
    seen_version = 0
    mode = "hold"
    hold_value = np.zeros(6)
    window: SplineControlWindow | None = None
    state = UpsampleState(n=1, n_max=config.n_max)
    h_index = 0

    clock.schedule(0.0, PHYSICS)
    if len(h_times):
        clock.schedule(float(h_times[0]), HAPTIC)
    while clock:
        now, loop = clock.pop()
        if loop == PHYSICS:
            if tape is not None and now in tape:
                w, count, sep, traveled = tape[now]
            else:
                world.advance_to(now)
                w, count, sep = world.observe()
                traveled = world.travel
                if tape is not None:
                    tape[now] = (w, count, sep, traveled)
            period = scenario.period(count)
            phys_t.append(now)
            phys_v.append(w)
            periods.append(period)
            counts.append(count)
            seps.append(sep)
            travel.append(traveled)
            physics_box.put((now, w), now)
            clock.schedule(now, PREDICTION)
            if now + period < scenario.duration_ms:
                clock.schedule(now + period, PHYSICS)
        elif loop == PREDICTION:
            (ts, w), _, _ = physics_box.get()
            assert ts <= now
            history.append(w)
            est = estimator.observe(ts)
            if model is None or len(history) < 3:
                if model is not None:
                    model.ingest(w)
                haptic_box.put(("hold", w, None), now)
                continue
            report = model.ingest(w)
            if report.refit and first_refit is None:
                first_refit = now
            pred = model.predict_array(np.array(history))
            pred_t.append(now)
            pred_v.append(pred)
            controls = np.vstack([history[-3], history[-2], history[-1], pred])
            n = compute_n(scenario.haptic_rate_hz, est if est is not None else config.initial_period_ms, config.n_max)
            haptic_box.put(("spline", SplineControlWindow(controls, now), n), now)
        else:
            value, stamp, version = haptic_box.get()
            if version != seen_version:
                seen_version = version
                assert stamp <= now
                kind, payload, n = value
                if kind == "spline":
                    mode, window = "spline", payload
                    state = state.restart(n)
                else:
                    mode, hold_value = "hold", payload
            if mode == "spline":
                out, state = advance_array(state, window)
                if state.starved:
                    starved += 1
                hold_value = out
            else:
                out = hold_value
            h_out[h_index] = out
            h_index += 1
            if h_index < len(h_times):
                clock.schedule(float(h_times[h_index]), HAPTIC)

    if starved:
        logger.debug("%s/%s: %d haptic ticks held while physics stalled", scenario.name, method, starved)
    rate = scenario.haptic_rate_hz
    nominal = 1000.0 / float(np.mean(periods)) if periods else 0.0
    return RunRecord(
        scenario=scenario.name,
        method=method,
        haptic=Trace(h_times, h_out, scenario.name, rate),
        physics=Trace(np.array(phys_t), np.array(phys_v).reshape(-1, 6), scenario.name, nominal),
        prediction=Trace(np.array(pred_t), np.array(pred_v).reshape(-1, 6), scenario.name, nominal),
        t_ms=np.array(phys_t),
        physics_period_ms=np.array(periods),
        contact_count=np.array(counts, dtype=float),
        displacement_m=np.array(seps),
        travel_m=np.array(travel),
        starved_ticks=starved,
        first_refit_ms=first_refit,
    )


def run_comparison(scenario: Scenario, methods: Iterable[str] = METHODS, predictor: PredictorConfig | None = None, **kw) -> dict[str, RunRecord]:
    """Replay one scenario (same trajectory, same seed) through each method."""
    predictor = predictor or PredictorConfig()
    tape: dict = {}
    return {m: run(scenario, RunConfig(method=m, predictor=predictor, **kw), tape) for m in methods}


def reference_oracle(scenario: Scenario, substep_ms: float = 1.0) -> Trace:
    """Device wrench with physics stepped every ``substep_ms`` and sampled on the haptic grid."""
    world = PhysicsWorld(scenario.with_physics_period(substep_ms, substep_ms))
    times = haptic_times(scenario)
    out = np.empty((len(times), 6))
    for k, t in enumerate(times):
        world.advance_to(float(t))
        out[k] = world.observe()[0]
    return Trace(times, out, scenario.name, scenario.haptic_rate_hz)


def physics_trace(scenario: Scenario, tape: dict | None = None) -> Trace:
    """The physics loop alone, on the same tick schedule ``run`` uses."""
    world = PhysicsWorld(scenario)
    t_out, v_out = [], []
    now = 0.0
    while now < scenario.duration_ms:
        world.advance_to(now)
        w, count, sep = world.observe()
        if tape is not None:
            tape[now] = (w, count, sep, world.travel)
        t_out.append(now)
        v_out.append(w)
        now = now + scenario.period(count)
    rate = 1000.0 * len(t_out) / scenario.duration_ms
    return Trace(np.array(t_out), np.array(v_out).reshape(-1, 6), scenario.name, rate)
