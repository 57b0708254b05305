"""
One control tick: PFL → wrench → tensions → tether thrusts → quadrotor
attitude and moment.

Tether references (q_id, ω_id, ω̇_id) are functions of the ball–plate state
alone: q_id is differentiated by central differences along the designed
closed-loop flow (ö_p = U₁, Ω̇_p = U₂), never along the realized trajectory,
so no thrust the quadrotors actually produce feeds back into them.

Attitude references (Ω_id, Ω̇_id) come from backward differences of R_id over
ControllerMemory. A quadrotor's differences restart whenever its b₁ heading
switches or its setpoint is held: Ω_id is zero on the first tick of a streak,
Ω̇_id on the first two.
"""

import numpy as np

from control.pfl import (
    pfl_inputs, force_torque_from_U, allocate_tensions, designed_flow_step, desired_tensions, flow_rate
)
from control.quadrotor import quadrotor_attitude_setpoint, quadrotor_inputs
from control.tethers import parallel_controls, desired_tether_direction, perpendicular_controls
from geom.so3 import vee, skew_part
from models.errors import (
    ControlError, DegenerateTension, DegenerateThrust, GimbalDegeneracy, PlateSwarmError
)
from models.gains import Gains
from models.state import (
    SystemParams, SystemState, ControlInput, ControlTrace, ControllerMemory, TensionSet, N_QUADS
)

B1_DEFAULT = np.array([1.0, 0.0, 0.0])
B1_FALLBACK = np.array([0.0, 1.0, 0.0])

# [s] step of the designed flow used to differentiate q_id
FLOW_STEP = 1e-3


def _tether_direction(i, mu_i, s: SystemState, mem: ControllerMemory):
    try:
        return desired_tether_direction(mu_i)
    except DegenerateTension:
        # hold the last valid direction
        return mem.q_id[i].copy() if mem.q_id is not None else s.q[i].copy()


def tether_references(s: SystemState, g: Gains, p: SystemParams, mu: TensionSet, mem: ControllerMemory,
                      h: float = FLOW_STEP):
    """
    (q_id, ω_id, ω̇_id) with ω_id = q_id × q̇_id and ω̇_id = q_id × q̈_id.

    q̇_id, q̈_id are three-point central differences of μ_i/‖μ_i‖ at the
    designed-flow states one step h ahead and behind. A tether whose
    tension degenerates at any of the three points gets zero derivatives.
    """
    q_id = np.stack([_tether_direction(i, mu.mu[i], s, mem) for i in range(N_QUADS)])
    omega_id = np.zeros((N_QUADS, 3))
    omegadot_id = np.zeros((N_QUADS, 3))

    rate = flow_rate(s, g, p)
    ahead = desired_tensions(designed_flow_step(s, g, p, h, rate), g, p)
    behind = desired_tensions(designed_flow_step(s, g, p, -h, rate), g, p)
    for i in range(N_QUADS):
        try:
            q0 = desired_tether_direction(mu.mu[i])
            q_plus = desired_tether_direction(ahead.mu[i])
            q_minus = desired_tether_direction(behind.mu[i])
        except DegenerateTension:
            continue
        qdot = (q_plus - q_minus) / (2.0 * h)
        qddot = (q_plus - 2.0 * q0 + q_minus) / (h * h)
        omega_id[i] = np.cross(q0, qdot)
        omegadot_id[i] = np.cross(q0, qddot)
    return q_id, omega_id, omegadot_id


def _attitude_setpoint(i, u_i, s: SystemState, mem: ControllerMemory):
    """Returns (R_id, b1 used, held)."""
    try:
        return quadrotor_attitude_setpoint(u_i, B1_DEFAULT), B1_DEFAULT, False
    except GimbalDegeneracy:
        return quadrotor_attitude_setpoint(u_i, B1_FALLBACK), B1_FALLBACK, False
    except DegenerateThrust:
        held = mem.R_id[i].copy() if mem.R_id is not None else s.R[i].copy()
        return held, mem.b1[i], True


def compute_controls(s: SystemState, g: Gains, mem: ControllerMemory, p: SystemParams, dt: float):
    """Returns (ControlInput, ControlTrace, ControllerMemory)."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    first = mem.empty
    t = 0.0 if first else mem.t + dt

    U1, U2 = pfl_inputs(s, g, p)
    F, tau = force_torque_from_U(s, U1, U2, p)
    mu = allocate_tensions(F, tau, s.R_p, p)
    q_id, omega_id, omegadot_id = tether_references(s, g, p, mu, mem)

    # u∥ lies along q_i: the cable carries only the component of μ_i along it
    carried = TensionSet(mu=np.stack([s.q[i] * (s.q[i] @ mu.mu[i]) for i in range(N_QUADS)]))
    u_par = parallel_controls(s, carried, U1, U2, p)
    u_perp = perpendicular_controls(s, q_id, omega_id, omegadot_id, g, p, U1=U1, U2=U2)
    u = u_par + u_perp

    R_id = np.zeros((N_QUADS, 3, 3))
    Omega_id = np.zeros((N_QUADS, 3))
    Omegadot_id = np.zeros((N_QUADS, 3))
    b1 = np.zeros((N_QUADS, 3))
    streak = np.zeros(N_QUADS, dtype=int)
    f = np.zeros(N_QUADS)
    M = np.zeros((N_QUADS, 3))
    e_R = np.zeros((N_QUADS, 3))
    e_Omega = np.zeros((N_QUADS, 3))
    thrust = np.zeros((N_QUADS, 3))
    for i in range(N_QUADS):
        try:
            R_id[i], b1[i], held = _attitude_setpoint(i, u[i], s, mem)
            if not first and not held and np.array_equal(b1[i], mem.b1[i]):
                streak[i] = mem.streak[i] + 1
            if streak[i] >= 1:
                Omega_id[i] = vee(skew_part(mem.R_id[i].T @ R_id[i])) / dt
            if streak[i] >= 2:
                Omegadot_id[i] = (Omega_id[i] - mem.Omega_id[i]) / dt
            f[i], M[i], e_R[i], e_Omega[i] = quadrotor_inputs(
                s.R[i], s.Omega[i], R_id[i], Omega_id[i], Omegadot_id[i], p.J[i], g, u_i=u[i]
            )
        except PlateSwarmError as e:
            raise ControlError(i, "attitude", e) from e
        thrust[i] = f[i] * s.R[i][:, 2]

    trace = ControlTrace(
        U1=U1, U2=U2, F=F, tau=tau, mu=mu.mu, u_par=u_par, u_perp=u_perp, u=u,
        q_id=q_id, omega_id=omega_id, omegadot_id=omegadot_id,
        R_id=R_id, Omega_id=Omega_id, f=f, M=M, e_R=e_R, e_Omega=e_Omega,
    )
    new_mem = ControllerMemory(
        t=t, q_id=q_id, R_id=R_id, Omega_id=Omega_id, b1=b1, ticks=mem.ticks + 1, streak=streak,
    )
    return ControlInput(u=thrust, M=M), trace, new_mem
