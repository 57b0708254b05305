"""
sim/__init__.py
"""
from sim.integrator import step, rk4_lie_step, project, constraint_residuals, Constraints
from sim.trajectory import Trajectory, TrajectoryRecorder
from sim.runner import simulate, prepare_initial_state
