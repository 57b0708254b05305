"""
SO(3) / S² primitives
=====================
hat/vee, Rodrigues exponential, attitude error functions and the
quaternion conversion used for CSV output.

Every function is pure and works on plain numpy arrays.
"""

import numpy as np
from scipy.spatial.transform import Rotation

from geom.tolerances import get_tolerances
from models.errors import NonSkewInput

E3 = np.array([0.0, 0.0, 1.0])


# ═══════════════════════════════════════════════════════
#  HAT / VEE
# ═══════════════════════════════════════════════════════

def hat(v: np.ndarray) -> np.ndarray:
    """Skew matrix with hat(v) @ w == cross(v, w)."""
    x, y, z = v
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def vee(M: np.ndarray) -> np.ndarray:
    """Inverse of hat(). Raises NonSkewInput if M + Mᵀ is not ~0."""
    tol = get_tolerances().identity
    residual = float(np.max(np.abs(M + M.T)))
    if residual > tol:
        raise NonSkewInput(residual, tol)
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def skew_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M - M.T)


# ═══════════════════════════════════════════════════════
#  EXPONENTIAL
# ═══════════════════════════════════════════════════════

def exp_so3(v: np.ndarray) -> np.ndarray:
    """
    Rodrigues formula.

    Below the small-angle threshold the second-order series
    I + v̂ + ½v̂² is used instead of sin/θ and (1-cos)/θ².
    """
    K = hat(v)
    theta = float(np.linalg.norm(v))
    if theta < get_tolerances().small_angle:
        return np.eye(3) + K + 0.5 * K @ K
    a = np.sin(theta) / theta
    b = (1.0 - np.cos(theta)) / theta**2
    return np.eye(3) + a * K + b * K @ K


def project_to_so3(R: np.ndarray) -> np.ndarray:
    """Nearest rotation in Frobenius norm (polar factor via SVD)."""
    U, _, Vt = np.linalg.svd(R)
    D = np.diag([1.0, 1.0, np.linalg.det(U @ Vt)])
    return U @ D @ Vt


def rotation_about(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    return exp_so3(angle * axis / np.linalg.norm(axis))


# ═══════════════════════════════════════════════════════
#  ATTITUDE ERRORS
# ═══════════════════════════════════════════════════════

def attitude_error_plate(R_p: np.ndarray) -> np.ndarray:
    """η = ½(R_p − R_pᵀ)∨, the gradient of Ψ = ½tr(I − R_p)."""
    return vee(skew_part(R_p))


def psi(R_p: np.ndarray) -> float:
    """Ψ = ½tr(I − R_p)."""
    return 0.5 * float(np.trace(np.eye(3) - R_p))


def quad_attitude_errors(R_i, Omega_i, R_id, Omega_id):
    """
    e_R = ½(R_idᵀR_i − R_iᵀR_id)∨
    e_Ω = Ω_i − R_iᵀR_id Ω_id
    """
    e_R = vee(0.5 * (R_id.T @ R_i - R_i.T @ R_id))
    e_Omega = Omega_i - R_i.T @ R_id @ Omega_id
    return e_R, e_Omega


# ═══════════════════════════════════════════════════════
#  CHECKS / CONVERSION
# ═══════════════════════════════════════════════════════

def rotation_residual(R: np.ndarray) -> float:
    """‖RᵀR − I‖_F."""
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def is_rotation(R: np.ndarray, tol: float = None) -> bool:
    tol = get_tolerances().identity if tol is None else tol
    return rotation_residual(R) <= tol and abs(np.linalg.det(R) - 1.0) <= tol


def rotation_to_quaternion(R: np.ndarray) -> np.ndarray:
    """Hamilton quaternion [w, x, y, z] with w ≥ 0."""
    x, y, z, w = Rotation.from_matrix(R).as_quat()
    q = np.array([w, x, y, z])
    if q[0] < 0.0:
        q = -q
    return q / np.linalg.norm(q)
