"""
Plate Swarm Plant
=================
Equations of motion of the plate, the ball, three taut tethers and three
quadrotors.

Provides:
- mass_blocks / bias_terms: the ball–plate metric split into M₁₁, M₁₂, M₂₂ and N₁, N₂
- decoupled_dynamics: ball–plate accelerations from tether tensions alone
- full_dynamics: every acceleration of the coupled system from thrusts and moments
- tensions: tether tensions from parallel thrusts and plate accelerations
- body_positions
- eom_residuals: each equation of motion evaluated at given accelerations

The ball–plate unknowns are ordered (r̈_b, ö_p, Ω̇_p) throughout: 2 + 3 + 3 = 8.
"""

from typing import Tuple

import numpy as np

from geom.so3 import hat, E3
from geom.tolerances import get_tolerances
from models.errors import SingularMassMatrix, NonParallelInput
from models.state import (
    SystemParams, SystemState, Accelerations, ControlInput, TensionSet, E, N_QUADS
)


# ═══════════════════════════════════════════════════════
#  BALL–PLATE METRIC
# ═══════════════════════════════════════════════════════

def mass_blocks(s: SystemState, p: SystemParams):
    """(M11 2×2, M12 2×6, M22 6×6)."""
    R = s.R_p
    ph = hat(E @ s.r_b)
    M11 = p.m_b * np.eye(2)
    M12 = np.hstack([p.m_b * E.T @ R.T, -p.m_b * E.T @ ph])
    M22 = np.block([
        [(p.m_p + p.m_b) * np.eye(3), -p.m_b * R @ ph],
        [p.m_b * ph @ R.T, p.J_p - p.m_b * ph @ ph],
    ])
    return M11, M12, M22


def mass_matrix(s: SystemState, p: SystemParams) -> np.ndarray:
    """Assembled 8×8 M_bp."""
    M11, M12, M22 = mass_blocks(s, p)
    return np.block([[M11, M12], [M12.T, M22]])


def bias_terms(s: SystemState, p: SystemParams):
    """
    (N1 2-vector, N2 6-vector).

    The Coriolis term of the translational row carries m_b, as row 2 of
    M_bp requires.
    """
    R, g = s.R_p, p.g
    W = hat(s.Omega_p)
    Er, Erd = E @ s.r_b, E @ s.rdot_b
    ph = hat(Er)
    ball = W @ W @ Er + 2.0 * W @ Erd + R.T @ (g * E3)
    N1 = p.m_b * E.T @ ball
    N2_trans = p.m_p * g * E3 + p.m_b * R @ W @ W @ Er + 2.0 * p.m_b * R @ W @ Erd + p.m_b * g * E3
    N2_rot = W @ p.J_p @ s.Omega_p + p.m_b * ph @ ball
    return N1, np.concatenate([N2_trans, N2_rot])


def _solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > get_tolerances().max_condition:
        raise SingularMassMatrix(cond)
    return np.linalg.solve(A, b)


# ═══════════════════════════════════════════════════════
#  DECOUPLED BALL–PLATE DYNAMICS
# ═══════════════════════════════════════════════════════

def decoupled_dynamics(s: SystemState, mu: TensionSet, p: SystemParams):
    """M_bp·[r̈_b; ö_p; Ω̇_p] + [N1; N2] = [0; F; τ]."""
    F, tau = mu.wrench(s.R_p, p)
    return decoupled_from_wrench(s, F, tau, p)


def decoupled_from_wrench(s: SystemState, F: np.ndarray, tau: np.ndarray, p: SystemParams):
    N1, N2 = bias_terms(s, p)
    rhs = np.concatenate([np.zeros(2), F, tau]) - np.concatenate([N1, N2])
    acc = _solve(mass_matrix(s, p), rhs)
    return acc[0:2], acc[2:5], acc[5:8]


# ═══════════════════════════════════════════════════════
#  FULL COUPLED DYNAMICS
# ═══════════════════════════════════════════════════════

def _ball_plate_residual(s: SystemState, u: np.ndarray, p: SystemParams, acc: np.ndarray,
                         bias: bool = True) -> np.ndarray:
    """
    Ball, plate-translation and plate-orientation equations with the tether
    accelerations eliminated, evaluated on a batch of acceleration columns.

    acc is 8×K; the result is 8×K ordered (ball 2, translation 3, orientation 3).
    With bias=False every acceleration-free term is dropped, leaving the
    linear map itself.
    """
    rdd, odd, Wd = acc[0:2], acc[2:5], acc[5:8]
    R, g, m = s.R_p, p.g, p.m
    W = hat(s.Omega_p)
    Er, Erd = E @ s.r_b, E @ s.rdot_b
    ph = hat(Er)
    b = 1.0 if bias else 0.0
    ge3 = b * (g * E3)[:, None]

    ball = (R.T @ odd - ph @ Wd + E @ rdd
            + b * (W @ W @ Er + 2.0 * W @ Erd + R.T @ (g * E3))[:, None])
    res_ball = p.m_b * E.T @ ball

    res_trans = p.m_p * (odd + ge3) + p.m_b * R @ ball
    res_rot = p.J_p @ Wd + b * (W @ p.J_p @ s.Omega_p)[:, None] + p.m_b * ph @ ball
    for i in range(N_QUADS):
        Pq = np.outer(s.q[i], s.q[i])
        xh = p.x_hat[i]
        w2 = s.omega[i] @ s.omega[i]
        spin = R @ W @ W @ p.x[i]
        pull = m[i] * p.l[i] * w2 * s.q[i]
        load = m[i] * Pq @ (g * E3 + spin) - Pq @ u[i]
        res_trans = res_trans + (
            m[i] * Pq @ (odd - R @ xh @ Wd)
            + b * (load - pull)[:, None]
        )
        res_rot = res_rot + (
            -m[i] * xh @ R.T @ Pq @ R @ xh @ Wd
            + m[i] * xh @ R.T @ Pq @ odd
            + b * (xh @ R.T @ (load - Pq @ pull))[:, None]
        )
    return np.vstack([res_ball, res_trans, res_rot])


def _tether_acceleration(s, u_i, i, oddot_p, Omegadot_p, p):
    """ω̇_i = (1/l_i)·q̂_i[(u_i − m_ige₃)/m_i − ö_p − R_pΩ̂_p²x_i + R_px̂_iΩ̇_p]."""
    R, W = s.R_p, hat(s.Omega_p)
    inner = ((u_i - p.m[i] * p.g * E3) / p.m[i] - oddot_p
             - R @ W @ W @ p.x[i] + R @ p.x_hat[i] @ Omegadot_p)
    return np.cross(s.q[i], inner) / p.l[i]


def quadrotor_angular_acceleration(Omega_i, M_i, J_i) -> np.ndarray:
    """Ω̇_i = J_i⁻¹(M_i − Ω_i × J_iΩ_i)."""
    return np.linalg.solve(J_i, M_i - np.cross(Omega_i, J_i @ Omega_i))


def full_dynamics(s: SystemState, u: ControlInput, p: SystemParams) -> Accelerations:
    """
    Assemble the 8×8 ball–plate system column by column: the residual on
    I₈ without its acceleration-free terms gives the matrix, the residual
    at zero acceleration the constant vector.
    """
    A = _ball_plate_residual(s, u.u, p, np.eye(8), bias=False)
    base = _ball_plate_residual(s, u.u, p, np.zeros((8, 1)))[:, 0]
    acc = _solve(A, -base)
    rddot_b, oddot_p, Omegadot_p = acc[0:2], acc[2:5], acc[5:8]

    omegadot = np.stack([
        _tether_acceleration(s, u.u[i], i, oddot_p, Omegadot_p, p) for i in range(N_QUADS)
    ])
    Omegadot = np.stack([
        quadrotor_angular_acceleration(s.Omega[i], u.M[i], p.J[i]) for i in range(N_QUADS)
    ])
    return Accelerations(rddot_b=rddot_b, oddot_p=oddot_p, Omegadot_p=Omegadot_p,
                         omegadot=omegadot, Omegadot=Omegadot)


def eom_residuals(s: SystemState, u: ControlInput, acc: Accelerations, p: SystemParams) -> dict:
    """Each equation of motion evaluated at acc; all zero for an exact solution."""
    x = np.concatenate([acc.rddot_b, acc.oddot_p, acc.Omegadot_p])[:, None]
    bp = _ball_plate_residual(s, u.u, p, x)[:, 0]
    R, W = s.R_p, hat(s.Omega_p)
    tether = np.stack([
        p.m[i] * (np.cross(s.q[i], acc.oddot_p) + p.l[i] * acc.omegadot[i]
                  + np.cross(s.q[i], R @ W @ W @ p.x[i])
                  - np.cross(s.q[i], R @ p.x_hat[i] @ acc.Omegadot_p))
        - np.cross(s.q[i], u.u[i] - p.m[i] * p.g * E3)
        for i in range(N_QUADS)
    ])
    quad = np.stack([
        p.J[i] @ acc.Omegadot[i] + np.cross(s.Omega[i], p.J[i] @ s.Omega[i]) - u.M[i]
        for i in range(N_QUADS)
    ])
    return {
        "ball": bp[0:2],
        "translation": bp[2:5],
        "orientation": bp[5:8],
        "tether": tether,
        "quadrotor": quad,
    }


# ═══════════════════════════════════════════════════════
#  TENSIONS / POSITIONS
# ═══════════════════════════════════════════════════════

def tensions(s: SystemState, u_par: np.ndarray, accel: Tuple[np.ndarray, np.ndarray],
             p: SystemParams) -> TensionSet:
    """μ_i = u∥_i − q_iq_iᵀm_i(ö_p + R_pΩ̂_p²x_i − R_px̂_iΩ̇_p + ge₃ − l_i‖ω_i‖²q_i)."""
    oddot_p, Omegadot_p = accel
    R, W = s.R_p, hat(s.Omega_p)
    tol = get_tolerances().parallel
    mu = np.zeros((N_QUADS, 3))
    for i in range(N_QUADS):
        Pq = np.outer(s.q[i], s.q[i])
        off = float(np.linalg.norm(u_par[i] - Pq @ u_par[i]))
        if off > tol * max(1.0, float(np.linalg.norm(u_par[i]))):
            raise NonParallelInput(i, off)
        a_i = (oddot_p + R @ W @ W @ p.x[i] - R @ p.x_hat[i] @ Omegadot_p + p.g * E3
               - p.l[i] * (s.omega[i] @ s.omega[i]) * s.q[i])
        mu[i] = u_par[i] - p.m[i] * Pq @ a_i
    return TensionSet(mu=mu)


def body_positions(s: SystemState, p: SystemParams):
    """(o_b, [o_i])."""
    o_b = s.o_p + s.R_p @ E @ s.r_b
    o_i = np.stack([s.o_p + s.R_p @ p.x[i] + p.l[i] * s.q[i] for i in range(N_QUADS)])
    return o_b, o_i
