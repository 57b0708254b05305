"""
Trajectory oracles
==================
Independent checks of a recorded trajectory against the energies the
equations of motion were derived from.

Provides:
- euler_lagrange_residual: ball equation d/dt(∂ℒ/∂ṙ_b) − ∂ℒ/∂r_b by finite differences
- energy_audit: d(𝒯+𝒰)/dt against the power of the applied inputs
- internal_dynamics_report: the unstabilized horizontal plate drift
- height_condition_monitor: where the vertical-velocity condition of the
  stability argument fails
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from dynamics.energy import lagrangian, total_energy, body_velocities
from geom.so3 import E3
from models.errors import InsufficientSamples
from models.gains import Gains
from models.state import SystemParams, SystemState

H_RDOT = 1e-4   # ℒ is quadratic in ṙ_b: central differences are exact up to rounding
H_R = 1e-5


# ═══════════════════════════════════════════════════════
#  EULER–LAGRANGE
# ═══════════════════════════════════════════════════════

def _partial(s: SystemState, p: SystemParams, attr: str, h: float) -> np.ndarray:
    base = getattr(s, attr)
    grad = np.zeros(2)
    for j in range(2):
        d = np.zeros(2)
        d[j] = h
        up = lagrangian(s.replace(**{attr: base + d}), p)
        dn = lagrangian(s.replace(**{attr: base - d}), p)
        grad[j] = (up - dn) / (2.0 * h)
    return grad


def ball_momentum(s: SystemState, p: SystemParams) -> np.ndarray:
    """∂ℒ/∂ṙ_b."""
    return _partial(s, p, "rdot_b", H_RDOT)


def ball_force(s: SystemState, p: SystemParams) -> np.ndarray:
    """∂ℒ/∂r_b."""
    return _partial(s, p, "r_b", H_R)


def euler_lagrange_residual(traj, p: Optional[SystemParams] = None, g_scale: float = 1.0) -> float:
    """
    max_k ‖(P_{k+1} − P_{k−1})/(2dt) − Q_k‖ over interior samples.

    g_scale ≠ 1 evaluates ℒ with corrupted gravity (sensitivity check).
    """
    p = traj.params if p is None else p
    if g_scale != 1.0:
        p = replace(p, g=p.g * g_scale)
    n = len(traj)
    if n < 3:
        raise InsufficientSamples(3, n, "Euler–Lagrange residual")
    states = [traj.state(k) for k in range(n)]
    P = np.array([ball_momentum(s, p) for s in states])
    worst = 0.0
    for k in range(1, n - 1):
        dP = (P[k + 1] - P[k - 1]) / (traj.t[k + 1] - traj.t[k - 1])
        worst = max(worst, float(np.linalg.norm(dP - ball_force(states[k], p))))
    return worst


# ═══════════════════════════════════════════════════════
#  ENERGY AUDIT
# ═══════════════════════════════════════════════════════

@dataclass(frozen=True)
class EnergyAudit:
    max_abs: float          # max |ΔE/Δt − P̄| over steps
    max_rel: float          # max_abs over the largest of 1, |ΔE/Δt|, |P̄|
    max_power: float
    energy_drift: float     # max |E_k − E_0| / max(|E_0|, 1e-300)


def input_power(s: SystemState, u: np.ndarray, M: np.ndarray, p: SystemParams) -> float:
    """Σ(u_i·ȯ_i + M_i·Ω_i)."""
    _, v_i = body_velocities(s, p)
    return float(np.sum(u * v_i) + np.sum(M * s.Omega))


def energy_audit(traj, p: Optional[SystemParams] = None) -> EnergyAudit:
    """
    Work–energy balance per step. The input over [t_k, t_k+1) is the one
    recorded at sample k, so the step's work is the trapezoid of its power
    at both ends.
    """
    p = traj.params if p is None else p
    n = len(traj)
    if n < 2:
        raise InsufficientSamples(2, n, "energy audit")
    states = [traj.state(k) for k in range(n)]
    E = np.array([total_energy(s, p) for s in states])
    worst_abs = worst_rel = max_power = 0.0
    for k in range(n - 1):
        h = traj.t[k + 1] - traj.t[k]
        dE = (E[k + 1] - E[k]) / h
        P = 0.5 * (input_power(states[k], traj.u[k], traj.M[k], p)
                   + input_power(states[k + 1], traj.u[k], traj.M[k], p))
        gap = abs(dE - P)
        worst_abs = max(worst_abs, gap)
        worst_rel = max(worst_rel, gap / max(1.0, abs(dE), abs(P)))
        max_power = max(max_power, abs(P))
    drift = float(np.max(np.abs(E - E[0])) / max(abs(E[0]), 1e-300))
    return EnergyAudit(max_abs=worst_abs, max_rel=worst_rel, max_power=max_power, energy_drift=drift)


# ═══════════════════════════════════════════════════════
#  INTERNAL DYNAMICS / HEIGHT CONDITION
# ═══════════════════════════════════════════════════════

@dataclass(frozen=True)
class InternalDynamicsReport:
    window: float
    velocity_spread: np.ndarray   # max − min of ȯ_p1, ȯ_p2 over the window
    drift_velocity: np.ndarray    # mean ȯ_p1, ȯ_p2 over the window
    position_growth: np.ndarray   # |o_p| at the end minus at window start, x and y

    def settled(self, tol: float = 1e-3) -> bool:
        return bool(np.all(self.velocity_spread < tol))


def internal_dynamics_report(traj, window: float = 5.0) -> InternalDynamicsReport:
    t = traj.t
    start = int(np.searchsorted(t, t[-1] - window, side="left"))
    if len(t) - start < 2:
        raise InsufficientSamples(2, len(t) - start, "internal-dynamics window")
    v = traj.states[start:, 3:5]
    o = traj.states[start:, 0:2]
    return InternalDynamicsReport(
        window=float(t[-1] - t[start]),
        velocity_spread=v.max(axis=0) - v.min(axis=0),
        drift_velocity=v.mean(axis=0),
        position_growth=np.abs(o[-1]) - np.abs(o[0]),
    )


@dataclass(frozen=True)
class HeightConditionReport:
    violations: int
    samples: int

    @property
    def fraction(self) -> float:
        return self.violations / self.samples if self.samples else 0.0


def height_condition_monitor(traj, g: Optional[Gains] = None, p: Optional[SystemParams] = None) -> HeightConditionReport:
    """Count samples where |ȯ_pᵀe₃| ≤ g|−1 + (e₃ᵀR_pᵀe₃)²|/k₅."""
    g = traj.gains if g is None else g
    p = traj.params if p is None else p
    n = len(traj)
    bad = 0
    for k in range(n):
        s = traj.state(k)
        tilt = abs(-1.0 + float(E3 @ s.R_p.T @ E3) ** 2)
        if abs(s.v_p @ E3) <= p.g * tilt / g.k5:
            bad += 1
    return HeightConditionReport(violations=bad, samples=n)
