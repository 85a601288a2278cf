"""Adaptive 6-DOF virtual coupling between the haptic handle and the virtual tool.

Sign convention: ``coupling_force``/``coupling_torque`` return the wrench
displayed on the device. The tool receives the opposite wrench, which pulls it
toward the handle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

from .wrench import Orientation, Vec3, Wrench, rotation_vector_between

SignMode = Literal["standard_damper", "paper_literal"]
SIGN_MODES = ("standard_damper", "paper_literal")


@dataclass(frozen=True)
class DeviceState:
    P_HIP: Vec3 = Vec3()
    V_HIP: Vec3 = Vec3()
    U_HIP: Orientation = Orientation()
    W_HIP: Vec3 = Vec3()


@dataclass(frozen=True)
class ToolState:
    P_tool: Vec3 = Vec3()
    V_tool: Vec3 = Vec3()
    U_tool: Orientation = Orientation()
    W_tool: Vec3 = Vec3()
    m: float = 0.1
    I: float = 1e-4

    def __post_init__(self):
        if not self.m > 0 or not self.I > 0:
            raise ValueError("tool mass and inertia must be positive")

    @classmethod
    def at_device(cls, dev: DeviceState, m: float = 0.1, I: float = 1e-4) -> ToolState:
        return cls(dev.P_HIP, dev.V_HIP, dev.U_HIP, dev.W_HIP, m, I)


@dataclass(frozen=True)
class CouplingParams:
    k_t: float = 500.0
    b_t: float = 2.0 * math.sqrt(500.0 * 0.1)
    k_rot: float = 2.0
    b_rot: float = 2.0 * math.sqrt(2.0 * 1e-4)
    f_max: float = 8.5
    t_max: float = 0.5
    zeta: float = 1.0
    k_ref: float = 500.0
    k_rot_ref: float = 2.0
    sign_mode: SignMode = "standard_damper"

    def __post_init__(self):
        gains = (self.k_t, self.b_t, self.k_rot, self.b_rot, self.zeta, self.k_ref, self.k_rot_ref)
        if any(g < 0 for g in gains):
            raise ValueError("gains must be non-negative")
        if not (self.f_max > 0 and self.t_max > 0):
            raise ValueError("saturation caps must be positive")
        if self.sign_mode not in SIGN_MODES:
            raise ValueError(f"unknown sign mode {self.sign_mode!r}")

    def adapted(self, m: float, I: float) -> CouplingParams:
        """Copy with stiffness and damping chosen for a tool of mass m and inertia I."""
        k_t, b_t = adapt_translational(m, self)
        k_rot, b_rot = adapt_rotational(I, self)
        return replace(self, k_t=k_t, b_t=b_t, k_rot=k_rot, b_rot=b_rot)


def adapt_translational(m: float, params: CouplingParams) -> tuple[float, float]:
    """Mass-independent stiffness with critical damping b = 2·zeta·sqrt(k·m)."""
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m!r}")
    k_t = params.k_ref
    return k_t, 2.0 * params.zeta * math.sqrt(k_t * m)


def adapt_rotational(I: float, params: CouplingParams) -> tuple[float, float]:
    if not I > 0:
        raise ValueError(f"inertia must be positive, got {I!r}")
    k_rot = params.k_rot_ref
    return k_rot, 2.0 * params.zeta * math.sqrt(k_rot * I)


def _damping_sign(params: CouplingParams) -> float:
    # paper_literal adds the damping term; a physical damper opposes relative motion
    return 1.0 if params.sign_mode == "paper_literal" else -1.0


def coupling_force(dev: DeviceState, tool: ToolState, params: CouplingParams) -> Vec3:
    spring = (dev.P_HIP - tool.P_tool) * (-params.k_t)
    damper = (dev.V_HIP - tool.V_tool) * (_damping_sign(params) * params.b_t)
    return spring + damper


def coupling_torque(dev: DeviceState, tool: ToolState, params: CouplingParams) -> Vec3:
    spring = rotation_vector_between(dev.U_HIP, tool.U_tool) * (-params.k_rot)
    damper = (dev.W_HIP - tool.W_tool) * (_damping_sign(params) * params.b_rot)
    return spring + damper


def coupling_wrench(dev: DeviceState, tool: ToolState, params: CouplingParams) -> Wrench:
    return Wrench(coupling_force(dev, tool, params), coupling_torque(dev, tool, params))


def _clamp(v: Vec3, cap: float) -> Vec3:
    n = v.norm()
    return v * (cap / n) if n > cap else v


def saturate(wrench: Wrench, params: CouplingParams) -> Wrench:
    """Scale force and torque independently down to the device caps, keeping direction."""
    return Wrench(_clamp(wrench.force, params.f_max), _clamp(wrench.torque, params.t_max))
