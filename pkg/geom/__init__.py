"""
geom/__init__.py
"""
from geom.so3 import (
    E3, hat, vee, skew_part, exp_so3, project_to_so3, rotation_about,
    attitude_error_plate, psi, quad_attitude_errors,
    rotation_residual, is_rotation, rotation_to_quaternion
)
from geom.tolerances import Tolerances, get_tolerances
