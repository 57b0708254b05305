"""
Partial feedback linearization of the ball–plate subsystem, and the
min-norm split of the resulting plate wrench into three tether tensions,
and the designed closed-loop flow those tensions produce.
"""

import numpy as np

from dynamics.plant import mass_blocks, bias_terms
from geom.so3 import attitude_error_plate, exp_so3, E3
from geom.tolerances import get_tolerances
from models.errors import RankDeficientAttachment
from models.gains import Gains
from models.state import SystemParams, SystemState, TensionSet, E, N_QUADS


def pfl_inputs(s: SystemState, g: Gains, p: SystemParams):
    """
    U1 = R_pe₃e₃ᵀ(−k₅ȯ_p − k₆o_p) + (1/m_b)R_pE(−N₁ + M₁₁(k₄r_b + k₃ṙ_b))
    U2 = −k₂η − k₁Ω_p
    """
    R = s.R_p
    M11, _, _ = mass_blocks(s, p)
    N1, _ = bias_terms(s, p)
    height = R @ np.outer(E3, E3) @ (-g.k5 * s.v_p - g.k6 * s.o_p)
    ball = R @ E @ (-N1 + M11 @ (g.k4 * s.r_b + g.k3 * s.rdot_b)) / p.m_b
    U1 = height + ball
    U2 = -g.k2 * attitude_error_plate(R) - g.k1 * s.Omega_p
    return U1, U2


def schur_complement(s: SystemState, p: SystemParams) -> np.ndarray:
    """M₂₂ − M₁₂ᵀM₁₁⁻¹M₁₂."""
    M11, M12, M22 = mass_blocks(s, p)
    return M22 - M12.T @ np.linalg.solve(M11, M12)


def force_torque_from_U(s: SystemState, U1, U2, p: SystemParams):
    """[F; τ] = N₂ − M₁₂ᵀM₁₁⁻¹N₁ + (M₂₂ − M₁₂ᵀM₁₁⁻¹M₁₂)[U₁; U₂]."""
    M11, M12, M22 = mass_blocks(s, p)
    N1, N2 = bias_terms(s, p)
    M11_inv_M12 = np.linalg.solve(M11, M12)
    wrench = N2 - M12.T @ np.linalg.solve(M11, N1) + (M22 - M12.T @ M11_inv_M12) @ np.concatenate([U1, U2])
    return wrench[0:3], wrench[3:6]


def allocate_tensions(F, tau, R_p, p: SystemParams) -> TensionSet:
    """
    Minimum-norm tensions with Σμ_i = F and Σx̂_iR_pᵀμ_i = τ.

    Solves in the plate frame, A·[R_pᵀμ_1; R_pᵀμ_2; R_pᵀμ_3] = [R_pᵀF; τ],
    with A = [I I I; x̂₁ x̂₂ x̂₃], and rotates back.
    """
    A = p.attachment_matrix
    AAt = A @ A.T
    cond = np.linalg.cond(AAt)
    if not np.isfinite(cond) or cond > get_tolerances().max_condition:
        raise RankDeficientAttachment(f"cond(AAᵀ) = {cond:.3e}")
    w = np.concatenate([R_p.T @ F, tau])
    stacked = A.T @ np.linalg.solve(AAt, w)
    body = stacked.reshape(N_QUADS, 3)
    return TensionSet(mu=body @ R_p.T)


def allocation_residual(mu: TensionSet, F, tau, R_p, p: SystemParams) -> float:
    """‖A·stacked − [R_pᵀF; τ]‖∞."""
    stacked = (mu.mu @ R_p).ravel()
    w = np.concatenate([R_p.T @ F, tau])
    return float(np.max(np.abs(p.attachment_matrix @ stacked - w)))


# ═══════════════════════════════════════════════════════
#  DESIGNED FLOW
# ═══════════════════════════════════════════════════════

def designed_accelerations(s: SystemState, g: Gains, p: SystemParams):
    """
    (r̈_b, ö_p, Ω̇_p) when the allocated tensions act exactly:
    ö_p = U₁, Ω̇_p = U₂ and the ball row M₁₁r̈_b + M₁₂[U₁; U₂] + N₁ = 0.
    """
    U1, U2 = pfl_inputs(s, g, p)
    M11, M12, _ = mass_blocks(s, p)
    N1, _ = bias_terms(s, p)
    rddot_b = -np.linalg.solve(M11, N1 + M12 @ np.concatenate([U1, U2]))
    return rddot_b, U1, U2


def flow_rate(s: SystemState, g: Gains, p: SystemParams):
    rddot_b, oddot_p, Omegadot_p = designed_accelerations(s, g, p)
    return s.v_p, oddot_p, s.Omega_p, Omegadot_p, s.rdot_b, rddot_b


def _shift(s: SystemState, rate, h: float) -> SystemState:
    v_p, oddot_p, Omega_p, Omegadot_p, rdot_b, rddot_b = rate
    return s.replace(
        o_p=s.o_p + h * v_p, v_p=s.v_p + h * oddot_p,
        R_p=s.R_p @ exp_so3(h * Omega_p), Omega_p=s.Omega_p + h * Omegadot_p,
        r_b=s.r_b + h * rdot_b, rdot_b=s.rdot_b + h * rddot_b,
    )


def designed_flow_step(s: SystemState, g: Gains, p: SystemParams, h: float, rate=None) -> SystemState:
    """
    Heun step of length h (either sign) of the ball–plate state along the
    designed accelerations. Tethers and quadrotors are carried unchanged.
    """
    k0 = flow_rate(s, g, p) if rate is None else rate
    k1 = flow_rate(_shift(s, k0, h), g, p)
    return _shift(s, tuple(0.5 * (a + b) for a, b in zip(k0, k1)), h)


def desired_tensions(s: SystemState, g: Gains, p: SystemParams) -> TensionSet:
    U1, U2 = pfl_inputs(s, g, p)
    F, tau = force_torque_from_U(s, U1, U2, p)
    return allocate_tensions(F, tau, s.R_p, p)
