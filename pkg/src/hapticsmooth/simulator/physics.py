"""Tool dynamics: coupling + contact forces, semi-implicit Euler integration."""

from __future__ import annotations

import math

import numpy as np

from ..coupling import DeviceState, ToolState, coupling_force, coupling_torque, saturate
from ..wrench import Orientation, Vec3, Wrench


def step_physics(scenario, tool: ToolState, dev: DeviceState, dt: float, t_ms: float = 0.0) -> tuple[ToolState, Wrench]:
    """Advance the tool by ``dt`` ms and return it with the saturated device wrench.

    The device displays the saturated coupling wrench; the tool receives its
    negation plus contact and gravity forces.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    params = scenario.coupling_for(tool.m, tool.I)
    shown = saturate(Wrench(coupling_force(dev, tool, params), coupling_torque(dev, tool, params)), params)
    F, T = shown.force, shown.torque
    p = tool.P_tool.to_array()
    v = tool.V_tool.to_array()
    f_contact, _ = scenario.contact.evaluate(p, v, t_ms)
    f_tool = -F.to_array() + f_contact + tool.m * scenario.gravity
    h = dt / 1000.0
    v = v + f_tool / tool.m * h
    p = p + v * h
    w = tool.W_tool.to_array() - T.to_array() / tool.I * h
    u = tool.U_tool * Orientation.from_rotvec(w * h)
    new_tool = ToolState(Vec3.from_array(p), Vec3.from_array(v), u, Vec3.from_array(w), tool.m, tool.I)
    return new_tool, shown


def device_wrench(scenario, tool: ToolState, dev: DeviceState) -> Wrench:
    params = scenario.coupling_for(tool.m, tool.I)
    return saturate(Wrench(coupling_force(dev, tool, params), coupling_torque(dev, tool, params)), params)


def coupling_energy(tool: ToolState, dev: DeviceState, k_t: float) -> float:
    """Kinetic energy of the tool relative to the handle plus translational spring energy."""
    dv = tool.V_tool - dev.V_HIP
    dp = tool.P_tool - dev.P_HIP
    return 0.5 * tool.m * dv.dot(dv) + 0.5 * k_t * dp.dot(dp)


class PhysicsWorld:
    """Tool state advanced in substeps of at most ``scenario.substep_ms``."""

    def __init__(self, scenario):
        self.scenario = scenario
        self.t = 0.0
        self.tool = scenario.initial_tool()
        self.travel = 0.0

    def advance_to(self, t_ms: float) -> None:
        span = t_ms - self.t
        if span <= 0:
            return
        n_sub = max(1, math.ceil(span / self.scenario.substep_ms - 1e-9))
        h = span / n_sub
        times = self.t + h * np.arange(n_sub)
        traj = self.scenario.trajectory.sample(times)
        tool = self.tool
        for k in range(n_sub):
            prev = tool.P_tool
            tool, _ = step_physics(self.scenario, tool, traj.state(k), h, float(times[k]))
            self.travel += (tool.P_tool - prev).norm()
        self.tool = tool
        self.t = t_ms

    def observe(self) -> tuple[np.ndarray, int, float]:
        """(device wrench as 6-array, active contact count, tool-handle separation in m)."""
        dev = self.scenario.trajectory.state(self.t)
        w = device_wrench(self.scenario, self.tool, dev)
        count = self.scenario.contact.count_at(self.tool.P_tool.to_array(), self.t)
        return w.to_array(), count, (self.tool.P_tool - dev.P_HIP).norm()
