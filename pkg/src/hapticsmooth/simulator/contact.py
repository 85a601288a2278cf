"""Analytic contact stubs standing in for mesh collision detection.

Every stub maps the tool point's position and velocity (plus time, for
schedule-driven stubs) to a penalty force on the tool and an active contact
count. All randomness is a seeded function of time, so a run at any physics
rate sees the same contact world.
"""

from __future__ import annotations

import math

import numpy as np


def penalty_force(gap: float, normal, k_c: float) -> np.ndarray:
    """k_c·max(0, -gap) along the unit normal; zero when separated."""
    n = np.asarray(normal, dtype=float)
    if gap >= 0.0:
        return np.zeros(3)
    return (-gap * k_c) * n


class TimeNoise:
    """Seeded unit-variance noise, linear between knots spaced ``knot_ms`` apart."""

    def __init__(self, seed: int, duration_ms: float, knot_ms: float = 4.0):
        rng = np.random.default_rng(seed)
        self.knot_ms = knot_ms
        self.values = np.clip(rng.standard_normal(int(duration_ms / knot_ms) + 3), -2.5, 2.5)

    def __call__(self, t_ms: float) -> float:
        s = max(t_ms, 0.0) / self.knot_ms
        i = min(int(s), len(self.values) - 2)
        f = s - i
        return float((1.0 - f) * self.values[i] + f * self.values[i + 1])


class ContactStub:
    k_c: float = 0.0

    def evaluate(self, p: np.ndarray, v: np.ndarray, t_ms: float) -> tuple[np.ndarray, int]:
        """Return (force on tool in N, active contact count)."""
        raise NotImplementedError

    def count_at(self, p: np.ndarray, t_ms: float) -> int:
        return self.evaluate(p, np.zeros(3), t_ms)[1]


class NoContact(ContactStub):
    def evaluate(self, p, v, t_ms):
        return np.zeros(3), 0


class PlaneContact(ContactStub):
    """Half-space ``normal·p >= offset`` with penalty stiffness and normal damping."""

    def __init__(self, k_c: float = 2000.0, normal=(0.0, 0.0, 1.0), offset: float = 0.0, b_c: float = 0.0):
        n = np.asarray(normal, dtype=float)
        self.normal = n / np.linalg.norm(n)
        self.k_c = k_c
        self.offset = offset
        self.b_c = b_c

    def gap(self, p) -> float:
        return float(self.normal @ p) - self.offset

    def evaluate(self, p, v, t_ms):
        g = self.gap(p)
        if g >= 0.0:
            return np.zeros(3), 0
        vn = float(self.normal @ v)
        mag = max(0.0, -g * self.k_c - self.b_c * vn)
        return mag * self.normal, 1


class HoleContact(ContactStub):
    """Box with a vertical cylindrical hole, the peg reduced to its axis point.

    ``clearance`` is the hole radius minus the peg radius. Walls, the hole
    bottom and the box top each count as one contact when penetrated; normal
    forces are modulated by a seeded surface-roughness texture.
    """

    def __init__(
        self,
        k_c: float = 3000.0,
        b_c: float = 8.0,
        center=(0.0, 0.0),
        clearance: float = 0.004,
        top_z: float = 0.0,
        depth: float = 0.03,
        roughness: float = 0.0,
        texture: TimeNoise | None = None,
    ):
        self.k_c = k_c
        self.b_c = b_c
        self.center = np.asarray(center, dtype=float)
        self.clearance = clearance
        self.top_z = top_z
        self.bottom_z = top_z - depth
        self.roughness = roughness
        self.texture = texture

    def _normal_force(self, pen: float, vn: float, t_ms: float) -> float:
        mag = max(0.0, pen * self.k_c - self.b_c * vn)
        if self.texture is not None and self.roughness:
            mag *= 1.0 + self.roughness * self.texture(t_ms)
        return mag

    def evaluate(self, p, v, t_ms):
        f = np.zeros(3)
        count = 0
        d = p[:2] - self.center
        rho = math.hypot(d[0], d[1])
        z = p[2]
        if rho <= self.clearance:
            if z < self.bottom_z:
                f[2] += self._normal_force(self.bottom_z - z, v[2], t_ms)
                count += 1
            return f, count
        radial = d / rho
        if z >= self.top_z:
            return f, 0
        wall_pen = rho - self.clearance
        top_pen = self.top_z - z
        if wall_pen < top_pen:
            # inside the hole region, pushed back toward the axis
            vn = -float(radial @ v[:2])
            f[:2] -= self._normal_force(wall_pen, vn, t_ms) * radial
            count += 1
            if z < self.bottom_z:
                f[2] += self._normal_force(self.bottom_z - z, v[2], t_ms)
                count += 1
        else:
            f[2] += self._normal_force(top_pen, v[2], t_ms)
            count += 1
        return f, count


class ContactCountWalk:
    """Seeded piecewise-constant random walk over integer contact counts."""

    def __init__(self, seed: int, duration_ms: float, low: int = 11, high: int = 25, hold_ms=(60.0, 240.0), max_step: int = 3):
        rng = np.random.default_rng(seed)
        times = [0.0]
        counts = [int(rng.integers(low + 3, high - 2))]
        t = 0.0
        while t < duration_ms:
            t += float(rng.uniform(*hold_ms))
            step = int(rng.integers(-max_step, max_step + 1))
            counts.append(int(np.clip(counts[-1] + step, low, high)))
            times.append(t)
        self.low, self.high = low, high
        self.times = np.array(times)
        self.counts = np.array(counts)

    def __call__(self, t_ms: float) -> int:
        i = int(np.searchsorted(self.times, t_ms, side="right")) - 1
        return int(self.counts[max(i, 0)])


class MultiPointContact(ContactStub):
    """Plane contact whose stiffness scales with a scheduled contact count.

    ``k_c`` is the total stiffness at ``nominal_count`` contacts; the surface
    texture models the tick-to-tick jitter of a changing contact set.
    """

    def __init__(
        self,
        schedule: ContactCountWalk,
        k_c: float = 4000.0,
        b_c: float = 12.0,
        nominal_count: int = 20,
        normal=(0.0, 0.0, 1.0),
        offset: float = 0.0,
        roughness: float = 0.0,
        texture: TimeNoise | None = None,
    ):
        self.schedule = schedule
        self.plane = PlaneContact(k_c, normal, offset, b_c)
        self.k_c = k_c
        self.nominal_count = nominal_count
        self.roughness = roughness
        self.texture = texture

    def evaluate(self, p, v, t_ms):
        g = self.plane.gap(p)
        if g >= 0.0:
            return np.zeros(3), 0
        count = self.schedule(t_ms)
        scale = count / self.nominal_count
        vn = float(self.plane.normal @ v)
        mag = max(0.0, scale * (-g * self.k_c - self.plane.b_c * vn))
        if self.texture is not None and self.roughness:
            mag *= 1.0 + self.roughness * self.texture(t_ms)
        return mag * self.plane.normal, count

    def count_at(self, p, t_ms):
        return self.schedule(t_ms) if self.plane.gap(p) < 0.0 else 0
