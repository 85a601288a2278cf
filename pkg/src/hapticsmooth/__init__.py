"""Smooth 1 kHz haptic force rendering from a variable-rate physics stream."""

from .coupling import CouplingParams, DeviceState, ToolState
from .interpolator import SplineControlWindow, basis_weights, compute_n, interpolate
from .predictor import ArModel, PredictorConfig
from .wrench import Orientation, TimedWrench, Trace, Vec3, Wrench, rotation_vector_between

__version__ = "0.1.0"
