from .clock import HAPTIC, PHYSICS, PREDICTION, Mailbox, VirtualClock
from .contact import ContactCountWalk, HoleContact, MultiPointContact, NoContact, PlaneContact, TimeNoise, penalty_force
from .physics import PhysicsWorld, coupling_energy, device_wrench, step_physics
from .pipeline import METHODS, RunConfig, RunRecord, physics_trace, reference_oracle, run, run_comparison
from .scenarios import SCENARIOS, AnchoredPeriod, FixedPeriod, LinearPeriod, Scenario, make_scenario
from .trajectory import RecordedTrajectory, SplineTrajectory, Trajectory
