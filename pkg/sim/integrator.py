"""
Plate Swarm Integrator
======================
Fixed-step 4-stage Runge–Kutta on the configuration manifold.

Vector states (positions, velocities, rates) take classical RK4 stages.
Rotations and tether directions are never added to: each stage moves them
by the exponential of a Lie-algebra increment from the step's base point,

    R_p = R_p0·exp(θ_p)      (body rate Ω_p,   right action)
    R_i = R_i0·exp(θ_i)      (body rate Ω_i,   right action)
    q_i = exp(φ_i)·q_i0      (inertial rate ω_i, left action)

and the increments are driven through the truncated inverse of dexp,
which keeps fourth order on the group:

    θ̇ = Ω + ½θ×Ω + (1/12)θ×(θ×Ω)
    φ̇ = ω − ½φ×ω + (1/12)φ×(φ×ω)

After the step q_i is renormalized and the q_i-component of ω_i removed.
"""

from typing import Callable, NamedTuple, Optional

import numpy as np

from dynamics.plant import full_dynamics
from geom.so3 import exp_so3, project_to_so3, rotation_residual
from geom.tolerances import get_tolerances
from models.errors import StepDiverged
from models.state import SystemParams, SystemState, ControlInput, Accelerations, N_QUADS


class Constraints(NamedTuple):
    """Manifold residuals of one state."""
    q_norm: np.ndarray       # |‖q_i‖ − 1|
    omega_dot_q: np.ndarray  # |ω_i·q_i|
    R_p: float               # ‖R_pᵀR_p − I‖_F
    R: np.ndarray            # ‖R_iᵀR_i − I‖_F

    @property
    def res_q_max(self) -> float:
        return float(np.max(self.q_norm))

    @property
    def res_omega_max(self) -> float:
        return float(np.max(self.omega_dot_q))

    @property
    def res_R_max(self) -> float:
        return float(max(self.R_p, np.max(self.R)))

    @property
    def worst(self) -> float:
        return max(self.res_q_max, self.res_omega_max, self.res_R_max)


def constraint_residuals(s: SystemState) -> Constraints:
    return Constraints(
        q_norm=np.abs(np.linalg.norm(s.q, axis=1) - 1.0),
        omega_dot_q=np.abs(np.einsum("ij,ij->i", s.omega, s.q)),
        R_p=rotation_residual(s.R_p),
        R=np.array([rotation_residual(Ri) for Ri in s.R]),
    )


# ═══════════════════════════════════════════════════════
#  VECTOR FIELD PLUMBING
# ═══════════════════════════════════════════════════════

# A vector field maps a state to its accelerations.
VectorField = Callable[[SystemState], Accelerations]


def _vector_part(s: SystemState) -> np.ndarray:
    return np.concatenate([s.o_p, s.v_p, s.Omega_p, s.r_b, s.rdot_b, s.omega.ravel(), s.Omega.ravel()])


def _vector_rate(s: SystemState, a: Accelerations) -> np.ndarray:
    return np.concatenate([s.v_p, a.oddot_p, a.Omegadot_p, s.rdot_b, a.rddot_b,
                           a.omegadot.ravel(), a.Omegadot.ravel()])


def _with_vector(s: SystemState, z: np.ndarray, R_p, q, R) -> SystemState:
    return SystemState(
        o_p=z[0:3], v_p=z[3:6], R_p=R_p, Omega_p=z[6:9],
        r_b=z[9:11], rdot_b=z[11:13],
        q=q, omega=z[13:22].reshape(N_QUADS, 3),
        R=R, Omega=z[22:31].reshape(N_QUADS, 3),
    )


def _dexpinv_right(theta, Omega):
    c = np.cross(theta, Omega)
    return Omega + 0.5 * c + np.cross(theta, c) / 12.0


def _dexpinv_left(phi, omega):
    c = np.cross(phi, omega)
    return omega - 0.5 * c + np.cross(phi, c) / 12.0


# ═══════════════════════════════════════════════════════
#  STEP
# ═══════════════════════════════════════════════════════

_NODES = (0.0, 0.5, 0.5, 1.0)
_WEIGHTS = (1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0)


def rk4_lie_step(s: SystemState, field: VectorField, dt: float, t: float = 0.0,
                 tol: Optional[float] = None) -> SystemState:
    """
    One RKMK4 step of an arbitrary vector field, followed by projection.

    Raises StepDiverged as soon as a stage or the result is non-finite or
    beyond the divergence norm, before the field is evaluated on it.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    z0 = _vector_part(s)
    theta_p = np.zeros(3)
    phi = np.zeros((N_QUADS, 3))
    theta = np.zeros((N_QUADS, 3))

    dz_sum = np.zeros_like(z0)
    dtheta_p_sum = np.zeros(3)
    dphi_sum = np.zeros((N_QUADS, 3))
    dtheta_sum = np.zeros((N_QUADS, 3))

    prev = None
    for node, weight in zip(_NODES, _WEIGHTS):
        if prev is None:
            stage = s
        else:
            dz, dtp, dph, dth = prev
            theta_p = node * dt * dtp
            phi = node * dt * dph
            theta = node * dt * dth
            stage = _with_vector(
                s, z0 + node * dt * dz,
                s.R_p @ exp_so3(theta_p),
                np.stack([exp_so3(phi[i]) @ s.q[i] for i in range(N_QUADS)]),
                np.stack([s.R[i] @ exp_so3(theta[i]) for i in range(N_QUADS)]),
            )
        _guard(stage, t + node * dt)
        acc = field(stage)
        k_z = _vector_rate(stage, acc)
        k_tp = _dexpinv_right(theta_p, stage.Omega_p)
        k_ph = np.stack([_dexpinv_left(phi[i], stage.omega[i]) for i in range(N_QUADS)])
        k_th = np.stack([_dexpinv_right(theta[i], stage.Omega[i]) for i in range(N_QUADS)])
        prev = (k_z, k_tp, k_ph, k_th)

        dz_sum += weight * k_z
        dtheta_p_sum += weight * k_tp
        dphi_sum += weight * k_ph
        dtheta_sum += weight * k_th

    z1 = z0 + dt * dz_sum
    R_p = s.R_p @ exp_so3(dt * dtheta_p_sum)
    q = np.stack([exp_so3(dt * dphi_sum[i]) @ s.q[i] for i in range(N_QUADS)])
    R = np.stack([s.R[i] @ exp_so3(dt * dtheta_sum[i]) for i in range(N_QUADS)])
    out = project(_with_vector(s, z1, R_p, q, R), tol)
    _guard(out, t + dt)
    return out


def _guard(s: SystemState, t: float) -> None:
    worst = float(np.max(np.abs(s.pack())))
    if not np.isfinite(worst) or worst > get_tolerances().divergence:
        raise StepDiverged(t, worst)


def project(s: SystemState, tol: Optional[float] = None) -> SystemState:
    """Renormalize q_i, strip ω_i along q_i, re-orthonormalize drifted rotations."""
    tol = get_tolerances().projection if tol is None else tol
    q = s.q / np.linalg.norm(s.q, axis=1, keepdims=True)
    omega = s.omega - np.einsum("ij,ij->i", s.omega, q)[:, None] * q
    R_p = s.R_p if rotation_residual(s.R_p) <= tol else project_to_so3(s.R_p)
    R = np.stack([Ri if rotation_residual(Ri) <= tol else project_to_so3(Ri) for Ri in s.R])
    return s.replace(q=q, omega=omega, R_p=R_p, R=R)


def step(s: SystemState, u: ControlInput, p: SystemParams, dt: float, t: float = 0.0,
         tol: Optional[float] = None) -> SystemState:
    """Advance the full coupled system by dt with u held constant."""
    return rk4_lie_step(s, lambda x: full_dynamics(x, u, p), dt, t, tol)
