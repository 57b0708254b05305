"""
Kinetic and potential energy of the assembly.

The ball is a point mass sliding on the plate; no rolling inertia.
"""

import numpy as np

from geom.so3 import hat, E3
from models.state import SystemParams, SystemState, E, N_QUADS


def body_velocities(s: SystemState, p: SystemParams):
    """(ȯ_b, [ȯ_i]) in the inertial frame."""
    W = hat(s.Omega_p)
    v_b = s.v_p + s.R_p @ W @ E @ s.r_b + s.R_p @ E @ s.rdot_b
    v_i = np.stack([
        s.v_p + s.R_p @ W @ p.x[i] + p.l[i] * np.cross(s.omega[i], s.q[i])
        for i in range(N_QUADS)
    ])
    return v_b, v_i


def kinetic_energy(s: SystemState, p: SystemParams) -> float:
    v_b, v_i = body_velocities(s, p)
    T = 0.5 * p.m_p * s.v_p @ s.v_p + 0.5 * s.Omega_p @ p.J_p @ s.Omega_p
    for i in range(N_QUADS):
        T += 0.5 * p.m[i] * v_i[i] @ v_i[i] + 0.5 * s.Omega[i] @ p.J[i] @ s.Omega[i]
    T += 0.5 * p.m_b * v_b @ v_b
    return float(T)


def potential_energy(s: SystemState, p: SystemParams) -> float:
    U = p.m_p * p.g * s.o_p @ E3
    for i in range(N_QUADS):
        U += p.m[i] * p.g * E3 @ (s.o_p + s.R_p @ p.x[i] + p.l[i] * s.q[i])
    U += p.m_b * p.g * E3 @ (s.o_p + s.R_p @ E @ s.r_b)
    return float(U)


def total_energy(s: SystemState, p: SystemParams) -> float:
    return kinetic_energy(s, p) + potential_energy(s, p)


def lagrangian(s: SystemState, p: SystemParams) -> float:
    return kinetic_energy(s, p) - potential_energy(s, p)


def linear_momentum(s: SystemState, p: SystemParams) -> np.ndarray:
    v_b, v_i = body_velocities(s, p)
    return p.m_p * s.v_p + p.m_b * v_b + (p.m[:, None] * v_i).sum(axis=0)
