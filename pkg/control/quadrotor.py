"""
Quadrotor attitude layer: desired attitude from a thrust vector, and the
thrust/moment that track it.
"""

import numpy as np

from geom.so3 import hat, quad_attitude_errors
from geom.tolerances import get_tolerances
from models.errors import DegenerateThrust, GimbalDegeneracy
from models.gains import Gains


def quadrotor_attitude_setpoint(u_i: np.ndarray, b1: np.ndarray) -> np.ndarray:
    """R_id = [−b̂₃²b₁/‖·‖, b̂₃b₁/‖·‖, b₃] with b₃ = u_i/‖u_i‖."""
    tol = get_tolerances()
    f = float(np.linalg.norm(u_i))
    if f <= tol.f_min:
        raise DegenerateThrust(f, tol.f_min)
    b3 = u_i / f
    side = np.cross(b3, b1)
    s = float(np.linalg.norm(side))
    angle = np.degrees(np.arctan2(s, float(b3 @ b1)))
    if min(angle, 180.0 - angle) < tol.gimbal_deg:
        raise GimbalDegeneracy(min(angle, 180.0 - angle))
    b2c = side / s
    b1c = np.cross(b2c, b3)
    return np.column_stack([b1c, b2c, b3])


def quadrotor_inputs(R_i, Omega_i, R_id, Omega_id, Omegadot_id, J_i, g: Gains, u_i=None):
    """
    f_i = ‖u_i‖
    M_i = −(k_R/ε²)e_R − (k_Ω/ε)e_Ω + Ω_i×J_iΩ_i − J_i(Ω̂_iR_iᵀR_idΩ_id − R_iᵀR_idΩ̇_id)

    Returns (f_i, M_i, e_R, e_Ω); f_i is 0 when u_i is not given.
    """
    e_R, e_Omega = quad_attitude_errors(R_i, Omega_i, R_id, Omega_id)
    RtRd = R_i.T @ R_id
    M = (-(g.kR / g.eps**2) * e_R - (g.kOmega / g.eps) * e_Omega
         + np.cross(Omega_i, J_i @ Omega_i)
         - J_i @ (hat(Omega_i) @ RtRd @ Omega_id - RtRd @ Omegadot_id))
    f = 0.0 if u_i is None else float(np.linalg.norm(u_i))
    return f, M, e_R, e_Omega
