"""
Trajectory storage: packed numpy arrays, one row per recorded sample.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from models.gains import Gains
from models.state import SystemParams, SystemState, STATE_SIZE, N_QUADS


@dataclass
class Trajectory:
    params: SystemParams
    gains: Gains
    mode: str
    dt: float
    t: np.ndarray = field(default_factory=lambda: np.zeros(0))
    states: np.ndarray = field(default_factory=lambda: np.zeros((0, STATE_SIZE)))
    # applied inputs, held over [t_k, t_k+1)
    u: np.ndarray = field(default_factory=lambda: np.zeros((0, N_QUADS, 3)))
    M: np.ndarray = field(default_factory=lambda: np.zeros((0, N_QUADS, 3)))
    f: np.ndarray = field(default_factory=lambda: np.zeros((0, N_QUADS)))
    # control-trace arrays (empty dict when no controller ran)
    trace: Dict[str, np.ndarray] = field(default_factory=dict)
    # per-sample diagnostics: E_kin, E_pot, V, V2, res_q_max, res_omega_max, res_R_max, ...
    diagnostics: Dict[str, np.ndarray] = field(default_factory=dict)
    diverged_at: Optional[float] = None

    def __len__(self) -> int:
        return len(self.t)

    def state(self, k: int) -> SystemState:
        return SystemState.unpack(self.states[k])

    @property
    def final_state(self) -> SystemState:
        return self.state(len(self) - 1)

    @property
    def has_trace(self) -> bool:
        return bool(self.trace)

    def column(self, name: str) -> np.ndarray:
        return self.diagnostics[name]


class TrajectoryRecorder:
    """Collects per-sample rows, then freezes them into a Trajectory."""

    def __init__(self, params: SystemParams, gains: Gains, mode: str, dt: float):
        self._meta = dict(params=params, gains=gains, mode=mode, dt=dt)
        self._t, self._states, self._u, self._M, self._f = [], [], [], [], []
        self._trace: Dict[str, list] = {}
        self._diag: Dict[str, list] = {}

    def add(self, t: float, s: SystemState, u, M, f, trace: Optional[dict], diag: dict):
        self._t.append(t)
        self._states.append(s.pack())
        self._u.append(u)
        self._M.append(M)
        self._f.append(f)
        if trace is not None:
            for key, value in trace.items():
                self._trace.setdefault(key, []).append(value)
        for key, value in diag.items():
            self._diag.setdefault(key, []).append(value)

    def build(self, diverged_at: Optional[float] = None) -> Trajectory:
        return Trajectory(
            **self._meta,
            t=np.array(self._t),
            states=np.array(self._states).reshape(-1, STATE_SIZE),
            u=np.array(self._u).reshape(-1, N_QUADS, 3),
            M=np.array(self._M).reshape(-1, N_QUADS, 3),
            f=np.array(self._f).reshape(-1, N_QUADS),
            trace={k: np.array(v) for k, v in self._trace.items()},
            diagnostics={k: np.array(v) for k, v in self._diag.items()},
            diverged_at=diverged_at,
        )
