"""
Plate Swarm Runner
==================
simulate(): controller and integrator in lockstep, one recorded sample per
integrator step.

Modes:
- closed-loop    full control stack; the applied thrust is f_i·R_ie₃
- passive        u_i = 0, M_i = 0
- attitude-only  only (R_p, Ω_p) evolve, under Ω̇_p = U₂
- reduced        ball–plate driven by the allocated tensions through the
                 decoupled dynamics (ö_p = U₁, Ω̇_p = U₂); tethers and
                 quadrotors carried along frozen
"""

from typing import Optional

import numpy as np

from control.pfl import pfl_inputs, force_torque_from_U, allocate_tensions
from control.pipeline import compute_controls
from dynamics.energy import kinetic_energy, potential_energy
from dynamics.plant import decoupled_dynamics, body_positions
from models.errors import PlateSwarmError, StepDiverged
from models.scenario import Scenario, Mode
from models.state import (
    SystemState, ControlInput, ControllerMemory, ControlTrace, Accelerations, N_QUADS
)
from sim.integrator import rk4_lie_step, step, constraint_residuals
from sim.trajectory import Trajectory, TrajectoryRecorder
from verify.lyapunov import lyapunov_V, lyapunov_V2, lyapunov_z

_ZERO3 = np.zeros(3)
_ZERO33 = np.zeros((N_QUADS, 3))


# ═══════════════════════════════════════════════════════
#  MODE VECTOR FIELDS
# ═══════════════════════════════════════════════════════

def _frozen_accelerations(rddot_b=None, oddot_p=None, Omegadot_p=None) -> Accelerations:
    return Accelerations(
        rddot_b=np.zeros(2) if rddot_b is None else rddot_b,
        oddot_p=_ZERO3 if oddot_p is None else oddot_p,
        Omegadot_p=_ZERO3 if Omegadot_p is None else Omegadot_p,
        omegadot=_ZERO33, Omegadot=_ZERO33,
    )


def attitude_only_field(sc: Scenario):
    g = sc.gains

    def field(s: SystemState) -> Accelerations:
        _, U2 = pfl_inputs(s, g, sc.params)
        return _frozen_accelerations(Omegadot_p=U2)
    return field


def reduced_field(sc: Scenario):
    p, g = sc.params, sc.gains

    def field(s: SystemState) -> Accelerations:
        U1, U2 = pfl_inputs(s, g, p)
        F, tau = force_torque_from_U(s, U1, U2, p)
        rddot_b, oddot_p, Omegadot_p = decoupled_dynamics(s, allocate_tensions(F, tau, s.R_p, p), p)
        return _frozen_accelerations(rddot_b, oddot_p, Omegadot_p)
    return field


def prepare_initial_state(sc: Scenario) -> SystemState:
    """Zero the velocities a mode does not integrate."""
    s = sc.state0
    if sc.mode == Mode.ATTITUDE_ONLY:
        return s.replace(v_p=np.zeros(3), rdot_b=np.zeros(2), omega=np.zeros((N_QUADS, 3)),
                         Omega=np.zeros((N_QUADS, 3)))
    if sc.mode == Mode.REDUCED:
        return s.replace(omega=np.zeros((N_QUADS, 3)), Omega=np.zeros((N_QUADS, 3)))
    return s


# ═══════════════════════════════════════════════════════
#  RECORDING
# ═══════════════════════════════════════════════════════

def _diagnostics(s: SystemState, sc: Scenario) -> dict:
    p, g = sc.params, sc.gains
    res = constraint_residuals(s)
    o_b, o_i = body_positions(s, p)
    return {
        "E_kin": kinetic_energy(s, p),
        "E_pot": potential_energy(s, p),
        "V": lyapunov_V(s, g),
        "V2": lyapunov_V2(s.R_p, s.Omega_p, g),
        "res_q_max": res.res_q_max,
        "res_omega_max": res.res_omega_max,
        "res_R_max": res.res_R_max,
        "z": lyapunov_z(s),
        "o_b": o_b,
        "o_i": o_i,
    }


def _trace_row(trace: ControlTrace) -> dict:
    return {
        "U1": trace.U1, "U2": trace.U2, "F": trace.F, "tau": trace.tau,
        "mu": trace.mu, "u_par": trace.u_par, "u_perp": trace.u_perp, "u_cmd": trace.u,
        "q_id": trace.q_id, "omega_id": trace.omega_id, "omegadot_id": trace.omegadot_id,
        "R_id": trace.R_id, "Omega_id": trace.Omega_id,
        "f_cmd": trace.f, "M_cmd": trace.M, "e_R": trace.e_R, "e_Omega": trace.e_Omega,
    }


# ═══════════════════════════════════════════════════════
#  SIMULATE
# ═══════════════════════════════════════════════════════

def simulate(sc: Scenario, verbose: bool = False, inputs: Optional[ControlInput] = None) -> Trajectory:
    """
    Run a scenario. Any PlateSwarmError raised mid-run (StepDiverged,
    ControlError, SingularMassMatrix, ...) carries .trajectory with the
    samples recorded so far.

    inputs: constant open-loop (u, M) applied in passive mode instead of zeros.
    """
    p, g, cfg = sc.params, sc.gains, sc.integrator
    dt, n = cfg.dt, cfg.n_steps
    mode = Mode(sc.mode)
    if inputs is not None and mode != Mode.PASSIVE:
        raise ValueError(f"open-loop inputs need passive mode, not {mode.value}")
    rec = TrajectoryRecorder(p, g, mode.value, dt)

    field = None
    if mode == Mode.ATTITUDE_ONLY:
        field = attitude_only_field(sc)
    elif mode == Mode.REDUCED:
        field = reduced_field(sc)

    s = prepare_initial_state(sc)
    mem = ControllerMemory()
    ctrl = ControlInput.zeros() if inputs is None else inputs
    trace_row: Optional[dict] = None
    report_every = max(1, n // 10)

    if verbose:
        print(f"[Sim] ▶ {sc.name}: {mode.value}, {n} steps of {dt} s")

    for k in range(n + 1):
        t = k * dt
        try:
            if mode == Mode.CLOSED_LOOP and k % cfg.decimation == 0:
                ctrl, trace, mem = compute_controls(s, g, mem, p, dt * cfg.decimation)
                trace_row = _trace_row(trace)
            f = np.linalg.norm(ctrl.u, axis=1)
            rec.add(t, s, ctrl.u, ctrl.M, f, trace_row, _diagnostics(s, sc))
            if k == n:
                break
            if field is None:
                s = step(s, ctrl, p, dt, t, cfg.projection_tol)
            else:
                s = rk4_lie_step(s, field, dt, t, cfg.projection_tol)
        except PlateSwarmError as e:
            print(f"[Sim] ❌ {sc.name}: {e}")
            e.trajectory = rec.build(diverged_at=e.t if isinstance(e, StepDiverged) else t)
            raise
        if verbose and (k + 1) % report_every == 0:
            print(f"[Sim] t = {t + dt:.3f} s ({100 * (k + 1) // n}%)")

    traj = rec.build()
    if verbose:
        print(f"[Sim] ✅ {sc.name}: {len(traj)} samples")
    return traj
