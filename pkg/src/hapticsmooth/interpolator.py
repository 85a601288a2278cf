"""Uniform cubic B-spline upsampling of the physics-rate wrench stream."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .wrench import Wrench

# rows multiply (u³, u², u, 1); columns select controls oldest-first
SPLINE_MATRIX = np.array(
    [
        [-1.0, 3.0, -3.0, 1.0],
        [3.0, -6.0, 3.0, 0.0],
        [-3.0, 0.0, 3.0, 0.0],
        [1.0, 4.0, 1.0, 0.0],
    ]
) / 6.0


def basis_weights(u: float) -> np.ndarray:
    """Weights of the four controls at parameter ``u`` in [0, 1]."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [0, 1], got {u!r}")
    return _weights(u)


def _weights(u: float) -> np.ndarray:
    u2 = u * u
    u3 = u2 * u
    return np.array(
        [
            (-u3 + 3.0 * u2 - 3.0 * u + 1.0) / 6.0,
            (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0,
            (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0,
            u3 / 6.0,
        ]
    )


def basis_derivative_weights(u: float, order: int = 1) -> np.ndarray:
    """d^k/du^k of the basis weights, from the power-basis form."""
    if order == 1:
        powers = np.array([3.0 * u * u, 2.0 * u, 1.0, 0.0])
    elif order == 2:
        powers = np.array([6.0 * u, 2.0, 0.0, 0.0])
    else:
        raise ValueError("only first and second derivatives are supported")
    return powers @ SPLINE_MATRIX


@dataclass(frozen=True)
class SplineControlWindow:
    """Four control wrenches, oldest first; the newest is normally the AR prediction."""

    controls: np.ndarray  # (4, 6)
    segment_start_t: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.controls, dtype=float)
        if c.shape != (4, 6):
            raise ValueError(f"need exactly 4 control wrenches, got shape {c.shape}")
        object.__setattr__(self, "controls", c)

    @classmethod
    def of(cls, wrenches: Sequence[Wrench], segment_start_t: float = 0.0) -> SplineControlWindow:
        if len(wrenches) != 4:
            raise ValueError(f"need exactly 4 control wrenches, got {len(wrenches)}")
        return cls(np.array([w.to_array() for w in wrenches]), segment_start_t)

    def shifted(self, newest: np.ndarray, segment_start_t: float) -> SplineControlWindow:
        return SplineControlWindow(np.vstack([self.controls[1:], newest]), segment_start_t)


def interpolate_array(window: SplineControlWindow, u: float) -> np.ndarray:
    return _weights(u) @ window.controls


def interpolate(window: SplineControlWindow, u: float) -> Wrench:
    return Wrench.from_array(basis_weights(u) @ window.controls)


def compute_n(haptic_rate_hz: float, measured_physics_period_ms: float, n_max: int = 100) -> int:
    """Number of haptic frames per physics period, clamped to [1, n_max]."""
    if haptic_rate_hz <= 0 or measured_physics_period_ms <= 0:
        raise ValueError("rates must be positive")
    n = int(round(haptic_rate_hz * measured_physics_period_ms / 1000.0))
    return max(1, min(n, n_max))


class PeriodEstimator:
    """Exponentially smoothed physics-period estimate."""

    def __init__(self, alpha: float = 0.5, initial_ms: float | None = None):
        self.alpha = alpha
        self.value = initial_ms
        self._last_t: float | None = None

    def observe(self, t_ms: float) -> float | None:
        if self._last_t is not None:
            dt = t_ms - self._last_t
            self.value = dt if self.value is None else self.alpha * dt + (1.0 - self.alpha) * self.value
        self._last_t = t_ms
        return self.value


@dataclass(frozen=True)
class UpsampleState:
    n: int = 1
    i: int = 0
    n_max: int = 100
    # emissions since the segment started; > n means the physics side is stalling
    emitted: int = 0

    def __post_init__(self):
        if not 1 <= self.n <= self.n_max:
            raise ValueError(f"n={self.n} outside [1, {self.n_max}]")
        if not 0 <= self.i < self.n:
            raise ValueError(f"i={self.i} outside [0, {self.n - 1}]")

    @property
    def u(self) -> float:
        return self.i / self.n

    @property
    def starved(self) -> bool:
        return self.emitted > self.n

    def restart(self, n: int) -> UpsampleState:
        return UpsampleState(n=max(1, min(n, self.n_max)), i=0, n_max=self.n_max, emitted=0)


def advance(state: UpsampleState, window: SplineControlWindow) -> tuple[Wrench, UpsampleState]:
    """Emit the frame at u = i/n and step i, holding at (n-1)/n until the next restart."""
    out, nxt = advance_array(state, window)
    return Wrench.from_array(out), nxt


def advance_array(state: UpsampleState, window: SplineControlWindow) -> tuple[np.ndarray, UpsampleState]:
    out = interpolate_array(window, state.u)
    nxt = replace(state, i=min(state.i + 1, state.n - 1), emitted=state.emitted + 1)
    return out, nxt
