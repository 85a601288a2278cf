"""Device (haptic handle) trajectories: synthetic splines or recorded CSV."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..coupling import DeviceState
from ..wrench import Orientation, Vec3, read_rows, write_rows

TRAJECTORY_HEADER = ("t_ms", "px", "py", "pz", "qw", "qx", "qy", "qz", "vx", "vy", "vz", "wx", "wy", "wz")


@dataclass
class TrajectorySamples:
    """Batched device states; angular velocities are in the handle's body frame."""

    t: np.ndarray  # (k,) ms
    P: np.ndarray  # (k, 3) m
    V: np.ndarray  # (k, 3) m/s
    Q: np.ndarray  # (k, 4) w, x, y, z
    W: np.ndarray  # (k, 3) rad/s

    def state(self, k: int) -> DeviceState:
        return DeviceState(
            Vec3.from_array(self.P[k]),
            Vec3.from_array(self.V[k]),
            Orientation(*self.Q[k]),
            Vec3.from_array(self.W[k]),
        )


class Trajectory:
    def sample(self, t_ms) -> TrajectorySamples:
        raise NotImplementedError

    def state(self, t_ms: float) -> DeviceState:
        return self.sample(np.array([t_ms])).state(0)

    def write_csv(self, path, t_ms) -> None:
        s = self.sample(np.asarray(t_ms, dtype=float))
        write_rows(path, TRAJECTORY_HEADER, np.column_stack([s.t, s.P, s.Q, s.V, s.W]))


class SplineTrajectory(Trajectory):
    """Clamped cubic spline through position waypoints plus a tremor perturbation.

    Orientation is a rotation about a fixed unit axis whose angle follows its
    own spline, so the angular velocity is exactly angle'(t) times the axis.
    """

    def __init__(
        self,
        t_knots_ms,
        positions,
        angles=None,
        axis=(0.0, 0.0, 1.0),
        tremor_amp_m: float = 0.0,
        tremor_freqs_hz=(),
        tremor_phases=None,
    ):
        t = np.asarray(t_knots_ms, dtype=float)
        self._pos = CubicSpline(t, np.asarray(positions, dtype=float), bc_type="clamped", axis=0)
        ang = np.zeros(len(t)) if angles is None else np.asarray(angles, dtype=float)
        self._ang = CubicSpline(t, ang, bc_type="clamped")
        self._axis = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
        self._t0, self._t1 = t[0], t[-1]
        self.tremor_amp = tremor_amp_m
        self.tremor_freqs = np.asarray(tremor_freqs_hz, dtype=float).reshape(-1)
        # phases: (n_freqs, 3)
        self.tremor_phases = np.zeros((len(self.tremor_freqs), 3)) if tremor_phases is None else np.asarray(tremor_phases, dtype=float)

    def sample(self, t_ms) -> TrajectorySamples:
        t = np.atleast_1d(np.asarray(t_ms, dtype=float))
        tc = np.clip(t, self._t0, self._t1)
        P = self._pos(tc)
        V = self._pos(tc, 1) * 1000.0
        hold = (t < self._t0) | (t > self._t1)
        V[hold] = 0.0
        if self.tremor_amp and len(self.tremor_freqs):
            ts = t[:, None, None] / 1000.0
            w = 2.0 * np.pi * self.tremor_freqs[None, :, None]
            arg = w * ts + self.tremor_phases[None]
            P = P + self.tremor_amp * np.sin(arg).sum(axis=1)
            V = V + self.tremor_amp * (w * np.cos(arg)).sum(axis=1)
        ang = self._ang(tc)
        dang = self._ang(tc, 1) * 1000.0
        dang[hold] = 0.0
        half = 0.5 * ang
        Q = np.column_stack([np.cos(half), np.sin(half)[:, None] * self._axis[None, :]])
        W = dang[:, None] * self._axis[None, :]
        return TrajectorySamples(t, P, V, Q, W)


class RecordedTrajectory(Trajectory):
    """Piecewise-linear playback of a recorded trajectory CSV."""

    def __init__(self, t, P, Q, V, W):
        self.t = np.asarray(t, dtype=float)
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("trajectory timestamps must be strictly increasing")
        self.P, self.Q, self.V, self.W = (np.asarray(a, dtype=float) for a in (P, Q, V, W))
        norms = np.linalg.norm(self.Q, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise ValueError("trajectory quaternions must be unit-norm")

    @classmethod
    def read_csv(cls, path) -> RecordedTrajectory:
        header, data = read_rows(path)
        if tuple(header) != TRAJECTORY_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        return cls(data[:, 0], data[:, 1:4], data[:, 4:8], data[:, 8:11], data[:, 11:14])

    def sample(self, t_ms) -> TrajectorySamples:
        t = np.atleast_1d(np.asarray(t_ms, dtype=float))

        def lerp(a):
            return np.column_stack([np.interp(t, self.t, a[:, j]) for j in range(a.shape[1])])

        Q = lerp(self.Q)
        Q /= np.linalg.norm(Q, axis=1, keepdims=True)
        return TrajectorySamples(t, lerp(self.P), lerp(self.V), Q, lerp(self.W))
