"""
Lyapunov functions of the ball–plate closed loop, their monitors, and the
attitude bounds extracted from V₂(0).
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import linregress

from geom.so3 import attitude_error_plate, psi, E3
from models.errors import InsufficientSamples
from models.gains import Gains
from models.state import SystemState


@dataclass(frozen=True)
class LyapunovSample:
    t: float
    V: float
    V2: float
    z: np.ndarray   # (‖r_b‖, ‖ṙ_b‖, ‖η‖, ‖Ω_p‖, |o_pᵀe₃|, |ȯ_pᵀe₃|)


def lyapunov_V(s: SystemState, g: Gains, c1: Optional[float] = None, c2: Optional[float] = None) -> float:
    c1 = g.c1 if c1 is None else c1
    c2 = g.c2 if c2 is None else c2
    eta = attitude_error_plate(s.R_p)
    h, hdot = float(s.o_p @ E3), float(s.v_p @ E3)
    return float(
        0.5 * (g.k4 + c1 * g.k3) * s.r_b @ s.r_b
        + c1 * s.r_b @ s.rdot_b
        + 0.5 * s.rdot_b @ s.rdot_b
        + (g.k2 + c2 * g.k1) * psi(s.R_p)
        + c2 * eta @ s.Omega_p
        + 0.5 * s.Omega_p @ s.Omega_p
        + 0.5 * g.k6 * h * h
        + 0.5 * hdot * hdot
    )


def lyapunov_V2(R_p, Omega_p, g: Gains, c0: Optional[float] = None) -> float:
    c0 = g.c0 if c0 is None else c0
    eta = attitude_error_plate(R_p)
    return float(0.5 * Omega_p @ Omega_p + c0 * eta @ Omega_p + (g.k2 + c0 * g.k1) * psi(R_p))


def lyapunov_z(s: SystemState) -> np.ndarray:
    return np.array([
        np.linalg.norm(s.r_b),
        np.linalg.norm(s.rdot_b),
        np.linalg.norm(attitude_error_plate(s.R_p)),
        np.linalg.norm(s.Omega_p),
        abs(s.o_p @ E3),
        abs(s.v_p @ E3),
    ])


def lyapunov_sample(t: float, s: SystemState, g: Gains) -> LyapunovSample:
    return LyapunovSample(t=t, V=lyapunov_V(s, g), V2=lyapunov_V2(s.R_p, s.Omega_p, g), z=lyapunov_z(s))


def attitude_bounds_from_initial(s0: SystemState, g: Gains, c0: Optional[float] = None):
    """
    (C1, C2) with ‖Ω_p‖ ≤ C1 and ‖η‖ ≤ C2 while V₂ ≤ V₂(0).

    Ψ ≥ ½‖η‖² (1 − cos θ ≥ ½sin²θ) and Young on the cross term give
        V₂ ≥ ½(1 − c₀)‖Ω_p‖² + ½(k₂ + c₀k₁ − c₀)‖η‖²
    so C1 = √(2V₂(0)/(1 − c₀)) and C2 = √(2V₂(0)/(k₂ + c₀k₁ − c₀)),
    the latter capped at 1 since ‖η‖ = sin θ.
    """
    c0 = g.c0 if c0 is None else c0
    V2_0 = max(lyapunov_V2(s0.R_p, s0.Omega_p, g, c0), 0.0)
    C1 = float(np.sqrt(2.0 * V2_0 / (1.0 - c0)))
    C2 = float(min(1.0, np.sqrt(2.0 * V2_0 / (g.k2 + c0 * g.k1 - c0))))
    return C1, C2


@dataclass(frozen=True)
class MonotonicityReport:
    monotone: bool
    first_violation: Optional[int]    # sample index
    worst_increase: float
    tolerance: float


def monotonicity_monitor(t: Sequence[float], values: Sequence[float], transient: float = 0.5,
                         rel_tol: float = 1e-9) -> MonotonicityReport:
    """Sample-to-sample non-increase after the transient window, within rel_tol·values[0]."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        raise InsufficientSamples(2, len(v), "monotonicity monitor")
    tol = rel_tol * abs(v[0])
    start = int(np.searchsorted(t, t[0] + transient, side="left"))
    inc = np.diff(v[start:])
    if inc.size == 0:
        return MonotonicityReport(True, None, 0.0, tol)
    bad = np.nonzero(inc > tol)[0]
    return MonotonicityReport(
        monotone=bad.size == 0,
        first_violation=int(start + bad[0] + 1) if bad.size else None,
        worst_increase=float(np.max(inc)),
        tolerance=tol,
    )


def exponential_fit(t: Sequence[float], values: Sequence[float]):
    """Least-squares line through log(values); returns (rate, r_squared)."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = v > 0
    if np.count_nonzero(keep) < 3:
        raise InsufficientSamples(3, int(np.count_nonzero(keep)), "exponential fit")
    fit = linregress(t[keep], np.log(v[keep]))
    return -float(fit.slope), float(fit.rvalue**2)
