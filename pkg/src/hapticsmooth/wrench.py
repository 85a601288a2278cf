"""Value types shared by every stage of the force pipeline.

Units: positions in m, velocities in m/s, forces in N, torques in N·m,
angular velocities in rad/s, timestamps in ms.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TRACE_HEADER = ("t_ms", "fx", "fy", "fz", "tx", "ty", "tz")


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite component: {v!r}")


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        # a sum is finite only if every term is
        if not math.isfinite(self.x + self.y + self.z):
            _check_finite(self.x, self.y, self.z)

    @classmethod
    def from_array(cls, a) -> Vec3:
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __add__(self, other: Vec3) -> Vec3:
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vec3) -> Vec3:
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> Vec3:
        return Vec3(-self.x, -self.y, -self.z)

    def __mul__(self, s: float) -> Vec3:
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def dot(self, other: Vec3) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))


ZERO3 = Vec3()


@dataclass(frozen=True, slots=True)
class Orientation:
    """Unit quaternion (w, x, y, z), kept normalized with w >= 0."""

    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.w + self.x + self.y + self.z):
            _check_finite(self.w, self.x, self.y, self.z)
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if n == 0.0:
            raise ValueError("zero quaternion has no orientation")
        s = -1.0 if self.w < 0.0 else 1.0
        # skip the division for already-unit inputs so normalization is idempotent
        if abs(n - 1.0) > 4e-16 or s < 0.0:
            k = s / n
            object.__setattr__(self, "w", self.w * k)
            object.__setattr__(self, "x", self.x * k)
            object.__setattr__(self, "y", self.y * k)
            object.__setattr__(self, "z", self.z * k)

    @classmethod
    def identity(cls) -> Orientation:
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_rotvec(cls, v) -> Orientation:
        """Exponential map: rotation vector (rad) to quaternion."""
        vx, vy, vz = float(v[0]), float(v[1]), float(v[2])
        angle = math.sqrt(vx * vx + vy * vy + vz * vz)
        if angle < 1e-12:
            return cls(1.0, 0.5 * vx, 0.5 * vy, 0.5 * vz)
        s = math.sin(0.5 * angle) / angle
        return cls(math.cos(0.5 * angle), vx * s, vy * s, vz * s)

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> Orientation:
        a = np.asarray(axis, dtype=float)
        return cls.from_rotvec(a / np.linalg.norm(a) * angle)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    def conjugate(self) -> Orientation:
        return Orientation(self.w, -self.x, -self.y, -self.z)

    inverse = conjugate

    def __mul__(self, o: Orientation) -> Orientation:
        """Hamilton product ``self ∘ o``."""
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = o.w, o.x, o.y, o.z
        return Orientation(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def to_matrix(self) -> np.ndarray:
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ]
        )

    def log(self) -> Vec3:
        """Logarithm map to a rotation vector with angle in [0, pi]."""
        w, x, y, z = self.w, self.x, self.y, self.z
        s = math.sqrt(x * x + y * y + z * z)
        if s < 1e-12:
            # first-order series; w is ~1 here
            k = 2.0 / w
        else:
            k = 2.0 * math.atan2(s, w) / s
        return Vec3(x * k, y * k, z * k)


def rotation_vector_between(a: Orientation, b: Orientation) -> Vec3:
    """Axis-angle vector (rad) of the relative rotation ``b⁻¹ ∘ a``."""
    if a == b:
        # the product leaves rounding residue; coincident poses must give exactly zero
        return Vec3()
    return (b.conjugate() * a).log()


@dataclass(frozen=True, slots=True)
class Wrench:
    force: Vec3 = ZERO3
    torque: Vec3 = ZERO3

    @classmethod
    def from_array(cls, a) -> Wrench:
        return cls(
            Vec3(float(a[0]), float(a[1]), float(a[2])),
            Vec3(float(a[3]), float(a[4]), float(a[5])),
        )

    def to_array(self) -> np.ndarray:
        f, t = self.force, self.torque
        return np.array([f.x, f.y, f.z, t.x, t.y, t.z])

    def __add__(self, other: Wrench) -> Wrench:
        return Wrench(self.force + other.force, self.torque + other.torque)

    def __neg__(self) -> Wrench:
        return Wrench(-self.force, -self.torque)


ZERO_WRENCH = Wrench()


def wrench_linear_combine(coeffs: Sequence[float], wrenches: Sequence[Wrench]) -> Wrench:
    """Component-wise weighted sum of wrenches."""
    if len(coeffs) != len(wrenches):
        raise ValueError(f"length mismatch: {len(coeffs)} coefficients, {len(wrenches)} wrenches")
    if not wrenches:
        raise ValueError("need at least one wrench")
    acc = np.zeros(6)
    for c, w in zip(coeffs, wrenches):
        acc += float(c) * w.to_array()
    return Wrench.from_array(acc)


@dataclass(frozen=True, slots=True)
class TimedWrench:
    t: float
    wrench: Wrench

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0.0:
            raise ValueError(f"timestamp must be finite and non-negative, got {self.t!r}")


@dataclass
class Trace:
    """Ordered wrench samples, stored column-wise.

    ``t`` is (n,) in ms and ``values`` is (n, 6) with columns fx, fy, fz, tx, ty, tz.
    """

    t: np.ndarray
    values: np.ndarray
    scenario: str = ""
    nominal_rate_hz: float = 0.0

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=float).reshape(-1, 6)
        if len(self.t) != len(self.values):
            raise ValueError("timestamp and value counts differ")
        if not np.all(np.isfinite(self.t)) or not np.all(np.isfinite(self.values)):
            raise ValueError("trace contains non-finite entries")
        if len(self.t) and self.t[0] < 0:
            raise ValueError("negative timestamp")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("timestamps must be strictly increasing")

    @classmethod
    def from_samples(cls, samples: Iterable[TimedWrench], scenario: str = "", nominal_rate_hz: float = 0.0) -> Trace:
        samples = list(samples)
        t = [s.t for s in samples]
        v = [s.wrench.to_array() for s in samples] or np.zeros((0, 6))
        return cls(np.array(t), np.array(v), scenario, nominal_rate_hz)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def samples(self) -> list[TimedWrench]:
        return [TimedWrench(float(t), Wrench.from_array(v)) for t, v in zip(self.t, self.values)]

    @property
    def force(self) -> np.ndarray:
        return self.values[:, :3]

    @property
    def torque(self) -> np.ndarray:
        return self.values[:, 3:]

    def window(self, start_ms: float, end_ms: float = math.inf) -> Trace:
        m = (self.t >= start_ms) & (self.t < end_ms)
        return Trace(self.t[m], self.values[m], self.scenario, self.nominal_rate_hz)

    def resample_zoh(self, t_new) -> Trace:
        """Zero-order hold onto new timestamps (first sample held backwards)."""
        t_new = np.asarray(t_new, dtype=float)
        idx = np.searchsorted(self.t, t_new, side="right") - 1
        idx = np.clip(idx, 0, len(self.t) - 1)
        return Trace(t_new, self.values[idx], self.scenario, self.nominal_rate_hz)

    def write_csv(self, path) -> None:
        write_rows(path, TRACE_HEADER, np.column_stack([self.t, self.values]))

    @classmethod
    def read_csv(cls, path, scenario: str = "", nominal_rate_hz: float = 0.0) -> Trace:
        header, data = read_rows(path)
        if tuple(header) != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        data = data.reshape(-1, 7)
        return cls(data[:, 0], data[:, 1:], scenario, nominal_rate_hz)


def format_float(v: float) -> str:
    # repr gives the shortest string that round-trips
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def write_rows(path, header: Sequence[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) for v in row])


def read_rows(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = [[float(v) for v in row] for row in r if row]
    return header, np.array(data, dtype=float).reshape(len(data), len(header))
