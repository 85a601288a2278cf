"""Scenario definitions: free-space motion, peg-in-hole contact, multi-point contact."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ..coupling import CouplingParams, ToolState
from ..wrench import Vec3
from .contact import ContactCountWalk, ContactStub, HoleContact, MultiPointContact, NoContact, TimeNoise
from .trajectory import SplineTrajectory, Trajectory

SCENARIOS = ("free_space", "peg_contact", "complex_contact")
GRAVITY = np.array([0.0, 0.0, -9.81])
MIN_PERIOD_MS = 1000.0 / 150.0


class PeriodSchedule:
    """Maps the active contact count to the physics period in ms; non-decreasing in count."""

    def __call__(self, contact_count: int) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class FixedPeriod(PeriodSchedule):
    period_ms: float = 10.0

    def __call__(self, contact_count: int) -> float:
        return self.period_ms


@dataclass(frozen=True)
class LinearPeriod(PeriodSchedule):
    base_ms: float = MIN_PERIOD_MS
    per_contact_ms: float = 2.5

    def __call__(self, contact_count: int) -> float:
        return self.base_ms + self.per_contact_ms * contact_count


@dataclass(frozen=True)
class AnchoredPeriod(PeriodSchedule):
    """Period linear in contact count through two (count, rate) anchors.

    Counts outside the anchors are clamped to them, so the rate stays between
    the two anchor rates.
    """

    count_lo: int = 11
    rate_lo_hz: float = 72.0
    count_hi: int = 25
    rate_hi_hz: float = 50.0
    min_period_ms: float = MIN_PERIOD_MS

    def __call__(self, contact_count: int) -> float:
        p_lo = 1000.0 / self.rate_lo_hz
        p_hi = 1000.0 / self.rate_hi_hz
        slope = (p_hi - p_lo) / (self.count_hi - self.count_lo)
        c = min(max(contact_count, self.count_lo), self.count_hi)
        return max(self.min_period_ms, p_lo + slope * (c - self.count_lo))


@dataclass
class Scenario:
    name: str
    duration_ms: float
    seed: int
    mass: float
    inertia: float
    trajectory: Trajectory
    contact: ContactStub = field(default_factory=NoContact)
    period: PeriodSchedule = field(default_factory=FixedPeriod)
    gravity: np.ndarray = field(default_factory=lambda: GRAVITY.copy())
    coupling: CouplingParams = field(default_factory=CouplingParams)
    haptic_rate_hz: float = 1000.0
    substep_ms: float = 1.0
    # start of the interval used for method comparisons
    analysis_start_ms: float = 0.0

    def __post_init__(self):
        if not self.mass > 0 or not self.inertia > 0:
            raise ValueError("mass and inertia must be positive")
        self.gravity = np.asarray(self.gravity, dtype=float)

    def coupling_for(self, m: float, I: float) -> CouplingParams:
        return _adapted(self.coupling, m, I)

    def initial_tool(self) -> ToolState:
        """Tool at the handle pose, sagged by gravity to its static offset."""
        dev = self.trajectory.state(0.0)
        params = self.coupling_for(self.mass, self.inertia)
        sag = Vec3.from_array(self.mass * self.gravity / params.k_t) if params.k_t > 0 else Vec3()
        return ToolState(dev.P_HIP + sag, dev.V_HIP, dev.U_HIP, dev.W_HIP, self.mass, self.inertia)

    def with_physics_period(self, period_ms: float, substep_ms: float | None = None) -> Scenario:
        return replace(self, period=FixedPeriod(period_ms), substep_ms=substep_ms or min(self.substep_ms, period_ms))


@lru_cache(maxsize=64)
def _adapted(base: CouplingParams, m: float, I: float) -> CouplingParams:
    return base.adapted(m, I)


def _inertia(mass: float) -> float:
    # solid cylinder-ish peg, scales with mass
    return 1e-3 * mass


def _tremor(rng, amp):
    freqs = rng.uniform(6.0, 12.0, size=3)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(3, 3))
    return dict(tremor_amp_m=amp, tremor_freqs_hz=freqs, tremor_phases=phases)


def _random_axis(rng):
    a = rng.standard_normal(3)
    return a / np.linalg.norm(a)


def free_space(seed: int = 0, mass: float = 0.1, duration_ms: float = 3000.0, **kw) -> Scenario:
    """Handle static for the first second, then random motion; no contacts, 100 Hz physics."""
    rng = np.random.default_rng(seed)
    knots = [0.0, 1000.0]
    pos = [np.zeros(3), np.zeros(3)]
    ang = [0.0, 0.0]
    t = 1000.0
    while t < duration_ms:
        t = min(t + 250.0, duration_ms + 250.0)
        knots.append(t)
        pos.append(rng.uniform([-0.03, -0.03, -0.02], [0.03, 0.03, 0.02]))
        ang.append(float(rng.uniform(-0.3, 0.3)))
    traj = SplineTrajectory(knots, pos, ang, axis=_random_axis(rng))
    return Scenario("free_space", duration_ms, seed, mass, _inertia(mass), traj, NoContact(), FixedPeriod(10.0), **kw)


def peg_contact(seed: int = 0, mass: float = 0.1, duration_ms: float = 8000.0, **kw) -> Scenario:
    """Peg lowered into a hole, then pushed around against walls and bottom."""
    rng = np.random.default_rng(seed)
    knots = [0.0, 600.0]
    pos = [np.array([0.0, 0.0, 0.02]), np.array([0.0, 0.0, -0.012])]
    ang = [0.0, 0.0]
    t = 600.0
    while t < duration_ms:
        t += float(rng.uniform(150.0, 300.0))
        r = float(rng.uniform(0.002, 0.010))
        th = float(rng.uniform(0.0, 2.0 * math.pi))
        pos.append(np.array([r * math.cos(th), r * math.sin(th), rng.uniform(-0.038, -0.018)]))
        knots.append(t)
        ang.append(float(rng.uniform(-0.15, 0.15)))
    traj = SplineTrajectory(knots, pos, ang, axis=_random_axis(rng), **_tremor(rng, 3e-4))
    contact = HoleContact(
        k_c=3000.0,
        b_c=8.0,
        clearance=0.004,
        depth=0.03,
        roughness=0.3,
        texture=TimeNoise(seed + 7919, duration_ms + 1000.0),
    )
    return Scenario("peg_contact", duration_ms, seed, mass, _inertia(mass), traj, contact, LinearPeriod(MIN_PERIOD_MS, 2.5), **kw)


def complex_contact(seed: int = 0, mass: float = 0.1, duration_ms: float = 7000.0, **kw) -> Scenario:
    """Tool pressed and dragged on a surface while 11-25 scheduled contacts load the physics."""
    rng = np.random.default_rng(seed)
    knots = [0.0, 300.0]
    pos = [np.array([0.0, 0.0, 0.004]), np.array([0.0, 0.0, -0.010])]
    ang = [0.0, 0.0]
    t = 300.0
    xy = np.zeros(2)
    while t < duration_ms:
        t += float(rng.uniform(200.0, 400.0))
        xy = np.clip(xy + rng.uniform(-0.01, 0.01, size=2), -0.03, 0.03)
        pos.append(np.array([xy[0], xy[1], rng.uniform(-0.014, -0.007)]))
        knots.append(t)
        ang.append(float(rng.uniform(-0.2, 0.2)))
    traj = SplineTrajectory(knots, pos, ang, axis=_random_axis(rng), **_tremor(rng, 3e-4))
    walk = ContactCountWalk(seed + 104729, duration_ms + 1000.0, low=11, high=25)
    contact = MultiPointContact(
        walk,
        k_c=4000.0,
        b_c=12.0,
        nominal_count=20,
        roughness=0.3,
        texture=TimeNoise(seed + 7919, duration_ms + 1000.0),
    )
    return Scenario(
        "complex_contact", duration_ms, seed, mass, _inertia(mass), traj, contact, AnchoredPeriod(), analysis_start_ms=5500.0, **kw
    )


_FACTORIES = {"free_space": free_space, "peg_contact": peg_contact, "complex_contact": complex_contact}


def make_scenario(name: str, seed: int = 0, mass: float | None = None, duration_ms: float | None = None, **kw) -> Scenario:
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}") from None
    if mass is not None:
        kw["mass"] = mass
    if duration_ms is not None:
        kw["duration_ms"] = duration_ms
    return factory(seed=seed, **kw)
