"""
Boundary-layer monitor: decay of the quadrotor attitude errors.

Each error norm is fitted with an exponential envelope from its peak until
it has fallen two decades (or the trajectory ends). The fitted rate is
-slope of log‖e‖; for the attitude loop it scales like 1/ε.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np
from scipy.stats import linregress

from models.errors import InsufficientSamples
from models.state import N_QUADS

MIN_SAMPLES = 3


@dataclass(frozen=True)
class DecayFit:
    rate: float            # 1/s, positive when decaying
    r_squared: float
    peak: float
    final: float
    monotone: bool         # non-increasing after the transient window
    window: tuple          # (t_start, t_end) of the fitted span

    @property
    def exponential(self) -> bool:
        return self.rate > 1e-3 and self.r_squared > 0.9


@dataclass(frozen=True)
class BoundaryLayerReport:
    e_R: List[DecayFit]         # per quadrotor
    e_Omega: List[DecayFit]
    e_R_max: DecayFit           # max over quadrotors
    max_error: float            # largest ‖e_R‖ seen after the transient

    def rates(self) -> Dict[str, float]:
        out = {f"rate_eR_{i + 1}": f.rate for i, f in enumerate(self.e_R)}
        out["rate_eR_max"] = self.e_R_max.rate
        return out


def fit_decay(t: Sequence[float], values: Sequence[float], transient: float = 0.0,
              floor_ratio: float = 1e-2, rel_tol: float = 1e-9) -> DecayFit:
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(v) < MIN_SAMPLES:
        raise InsufficientSamples(MIN_SAMPLES, len(v), "decay fit")

    peak_idx = int(np.argmax(v))
    peak = float(v[peak_idx])
    below = np.nonzero(v[peak_idx:] < floor_ratio * peak)[0]
    end = peak_idx + int(below[0]) + 1 if below.size else len(v)
    span_t, span_v = t[peak_idx:end], v[peak_idx:end]

    keep = span_v > 0
    if np.count_nonzero(keep) < MIN_SAMPLES or peak <= 0:
        rate, r2 = 0.0, 0.0
    else:
        fit = linregress(span_t[keep], np.log(span_v[keep]))
        rate, r2 = -float(fit.slope), float(fit.rvalue**2)

    start = int(np.searchsorted(t, t[0] + transient, side="left"))
    tail = v[start:]
    monotone = bool(np.all(np.diff(tail) <= rel_tol * max(peak, 1e-300))) if tail.size > 1 else True
    return DecayFit(rate=rate, r_squared=r2, peak=peak, final=float(v[-1]), monotone=monotone,
                    window=(float(span_t[0]), float(span_t[-1])))


def boundary_layer_monitor(traj, transient: float = 0.0, floor_ratio: float = 1e-2) -> BoundaryLayerReport:
    """Decay report for ‖e_R_i‖ and ‖e_Ω_i‖ along a closed-loop trajectory."""
    if not traj.has_trace or len(traj) < MIN_SAMPLES:
        raise InsufficientSamples(MIN_SAMPLES, len(traj), "boundary-layer monitor")
    t = traj.t
    eR = np.linalg.norm(traj.trace["e_R"], axis=2)          # (N, 3)
    eW = np.linalg.norm(traj.trace["e_Omega"], axis=2)
    fits_R = [fit_decay(t, eR[:, i], transient, floor_ratio) for i in range(N_QUADS)]
    fits_W = [fit_decay(t, eW[:, i], transient, floor_ratio) for i in range(N_QUADS)]
    worst = eR.max(axis=1)
    start = int(np.searchsorted(t, t[0] + transient, side="left"))
    return BoundaryLayerReport(
        e_R=fits_R,
        e_Omega=fits_W,
        e_R_max=fit_decay(t, worst, transient, floor_ratio),
        max_error=float(worst[start:].max()) if start < len(worst) else 0.0,
    )


def predicted_attitude_error_rate(R_i: np.ndarray, R_id: np.ndarray, e_Omega: np.ndarray) -> np.ndarray:
    """ė_R = ½(tr(R_iᵀR_id)I − R_iᵀR_id)e_Ω, exact when R_id is constant."""
    C = R_i.T @ R_id
    return 0.5 * (np.trace(C) * np.eye(3) - C) @ e_Omega
