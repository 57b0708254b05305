"""
Tether-level control: the thrust components along each cable (carrying
the allocated tension) and across it (aligning the cable with its
desired direction).
"""

import numpy as np

from geom.so3 import hat, E3
from geom.tolerances import get_tolerances
from models.errors import DegenerateTension
from models.gains import Gains
from models.state import SystemParams, SystemState, TensionSet, N_QUADS


def _designed_acceleration(s: SystemState, i: int, U1, U2, p: SystemParams) -> np.ndarray:
    """a_i = U₁ + R_pΩ̂_p²x_i − R_px̂_iU₂ + ge₃ (plate accelerations replaced by U₁, U₂)."""
    R, W = s.R_p, hat(s.Omega_p)
    return U1 + R @ W @ W @ p.x[i] - R @ p.x_hat[i] @ U2 + p.g * E3


def parallel_controls(s: SystemState, mu: TensionSet, U1, U2, p: SystemParams) -> np.ndarray:
    """u∥_i = μ_i + q_iq_iᵀm_i(a_i − l_i‖ω_i‖²q_i)."""
    u_par = np.zeros((N_QUADS, 3))
    for i in range(N_QUADS):
        q = s.q[i]
        a = _designed_acceleration(s, i, U1, U2, p) - p.l[i] * (s.omega[i] @ s.omega[i]) * q
        u_par[i] = mu.mu[i] + p.m[i] * q * (q @ a)
    return u_par


def desired_tether_direction(mu_i: np.ndarray) -> np.ndarray:
    mu_min = get_tolerances().mu_min
    norm = float(np.linalg.norm(mu_i))
    if norm <= mu_min:
        raise DegenerateTension(norm, mu_min)
    return mu_i / norm


def perpendicular_controls(s: SystemState, q_id, omega_id, omegadot_id, g: Gains, p: SystemParams,
                           U1=None, U2=None) -> np.ndarray:
    """
    u⊥_i = −m_iq̂_i²a_i + m_il_iq̂_i(k₇e_q + k₈e_ω + (q_iᵀω_id)q̇_i + q̂_i²ω̇_id)

    e_q = q̂_id q_i,  e_ω = ω_i + q̂_iω_id.  Without U₁, U₂ the plate is
    taken as unaccelerated.
    """
    U1 = np.zeros(3) if U1 is None else U1
    U2 = np.zeros(3) if U2 is None else U2
    u_perp = np.zeros((N_QUADS, 3))
    for i in range(N_QUADS):
        q = s.q[i]
        qh = hat(q)
        a = _designed_acceleration(s, i, U1, U2, p)
        e_q = np.cross(q_id[i], q)
        e_omega = s.omega[i] + np.cross(q, omega_id[i])
        qdot = np.cross(s.omega[i], q)
        inner = (g.k7 * e_q + g.k8 * e_omega + (q @ omega_id[i]) * qdot
                 + qh @ qh @ omegadot_id[i])
        u_perp[i] = -p.m[i] * qh @ qh @ a + p.m[i] * p.l[i] * qh @ inner
    return u_perp
