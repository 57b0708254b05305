"""
control/__init__.py
"""
from control.pfl import (
    pfl_inputs, force_torque_from_U, schur_complement, allocate_tensions, allocation_residual
)
from control.tethers import parallel_controls, desired_tether_direction, perpendicular_controls
from control.quadrotor import quadrotor_attitude_setpoint, quadrotor_inputs
from control.pipeline import compute_controls
