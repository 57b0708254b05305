"""
Plate Swarm State Models
========================
Numeric value types for the plate / ball / three-tether / three-quadrotor
assembly.

Provides:
- SystemParams: masses, inertias, cable lengths, attachment points, gravity
- SystemState: full configuration + velocities (packs to a flat 76-vector)
- Accelerations, ControlInput, TensionSet
- ControllerMemory: attitude-setpoint history threaded through the controller
- ControlTrace: every intermediate of one control tick

Per-quadrotor quantities are stacked on the leading axis: ``q[i]`` is the
i-th tether direction, ``R[i]`` the i-th quadrotor attitude, and so on.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional

import numpy as np

from geom.so3 import hat, E3, is_rotation
from geom.tolerances import get_tolerances
from models.errors import RankDeficientAttachment, ScenarioError

# Fixed 3×2 embedding of the plate plane.
E = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])

N_QUADS = 3
STATE_SIZE = 76


# ═══════════════════════════════════════════════════════
#  PARAMETERS
# ═══════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class SystemParams:
    """Physical constants. Build through validated() to get the checks."""
    m_p: float
    m_b: float
    J_p: np.ndarray          # 3×3
    m: np.ndarray            # (3,)
    J: np.ndarray            # (3, 3, 3)
    l: np.ndarray            # (3,)
    x: np.ndarray            # (3, 3), row i = x_i in the plate frame
    g: float = 9.81

    @cached_property
    def x_hat(self) -> np.ndarray:
        return np.stack([hat(xi) for xi in self.x])

    @property
    def total_mass(self) -> float:
        return self.m_p + self.m_b + float(np.sum(self.m))

    @cached_property
    def attachment_matrix(self) -> np.ndarray:
        """A = [I I I; x̂₁ x̂₂ x̂₃] (6×9)."""
        top = np.hstack([np.eye(3)] * N_QUADS)
        bottom = np.hstack(list(self.x_hat))
        return np.vstack([top, bottom])

    def validated(self) -> "SystemParams":
        """Return self after checking every parameter invariant."""
        if self.m_p <= 0 or self.m_b <= 0:
            raise ScenarioError("plate and ball masses must be > 0", "params")
        if np.any(self.m <= 0):
            raise ScenarioError("quadrotor masses must be > 0", "params.m")
        if np.any(self.l <= 0):
            raise ScenarioError("cable lengths must be > 0", "params.l")
        if self.g < 0:
            raise ScenarioError("gravity must be ≥ 0", "params.g")
        for name, J in [("J_p", self.J_p)] + [(f"J[{i}]", Ji) for i, Ji in enumerate(self.J)]:
            if not np.allclose(J, J.T, atol=get_tolerances().identity):
                raise ScenarioError("inertia must be symmetric", f"params.{name}")
            if np.min(np.linalg.eigvalsh(J)) <= 0:
                raise ScenarioError("inertia must be positive definite", f"params.{name}")
        rank = np.linalg.matrix_rank(self.attachment_matrix)
        if rank < 6:
            raise RankDeficientAttachment(
                f"rank {rank} < 6, attachment points are collinear or coincident"
            )
        return self


# ═══════════════════════════════════════════════════════
#  STATE
# ═══════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class SystemState:
    o_p: np.ndarray          # plate position [m]
    v_p: np.ndarray          # plate velocity [m/s]
    R_p: np.ndarray          # plate attitude
    Omega_p: np.ndarray      # plate body rate [rad/s]
    r_b: np.ndarray          # ball position in the plate plane [m]
    rdot_b: np.ndarray       # ball velocity [m/s]
    q: np.ndarray            # (3, 3) tether directions
    omega: np.ndarray        # (3, 3) tether rates, inertial
    R: np.ndarray            # (3, 3, 3) quadrotor attitudes
    Omega: np.ndarray        # (3, 3) quadrotor body rates

    def pack(self) -> np.ndarray:
        return np.concatenate([
            self.o_p, self.v_p, self.R_p.ravel(), self.Omega_p,
            self.r_b, self.rdot_b,
            self.q.ravel(), self.omega.ravel(),
            self.R.ravel(), self.Omega.ravel(),
        ])

    @classmethod
    def unpack(cls, y: np.ndarray) -> "SystemState":
        y = np.asarray(y, dtype=float)
        return cls(
            o_p=y[0:3].copy(),
            v_p=y[3:6].copy(),
            R_p=y[6:15].reshape(3, 3).copy(),
            Omega_p=y[15:18].copy(),
            r_b=y[18:20].copy(),
            rdot_b=y[20:22].copy(),
            q=y[22:31].reshape(3, 3).copy(),
            omega=y[31:40].reshape(3, 3).copy(),
            R=y[40:67].reshape(3, 3, 3).copy(),
            Omega=y[67:76].reshape(3, 3).copy(),
        )

    def replace(self, **changes) -> "SystemState":
        return replace(self, **changes)

    @classmethod
    def hover(cls, R_p: Optional[np.ndarray] = None) -> "SystemState":
        """At rest at the origin, tethers vertical, everything level."""
        return cls(
            o_p=np.zeros(3), v_p=np.zeros(3),
            R_p=np.eye(3) if R_p is None else np.array(R_p, dtype=float),
            Omega_p=np.zeros(3),
            r_b=np.zeros(2), rdot_b=np.zeros(2),
            q=np.tile(E3, (N_QUADS, 1)), omega=np.zeros((N_QUADS, 3)),
            R=np.tile(np.eye(3), (N_QUADS, 1, 1)), Omega=np.zeros((N_QUADS, 3)),
        )

    def check(self, tol: Optional[float] = None) -> None:
        """Raise ScenarioError if a manifold invariant is violated."""
        tol = get_tolerances().identity if tol is None else tol
        if not np.all(np.isfinite(self.pack())):
            raise ScenarioError("state contains non-finite values", "initial_state")
        if not is_rotation(self.R_p, tol):
            raise ScenarioError("R_p is not a rotation", "initial_state.R_p")
        for i in range(N_QUADS):
            if abs(np.linalg.norm(self.q[i]) - 1.0) > tol:
                raise ScenarioError("tether direction is not a unit vector", f"initial_state.q[{i}]")
            if abs(self.omega[i] @ self.q[i]) > tol:
                raise ScenarioError("tether rate has a component along the tether", f"initial_state.omega[{i}]")
            if not is_rotation(self.R[i], tol):
                raise ScenarioError("quadrotor attitude is not a rotation", f"initial_state.R[{i}]")


@dataclass(frozen=True, eq=False)
class Accelerations:
    rddot_b: np.ndarray      # (2,)
    oddot_p: np.ndarray      # (3,)
    Omegadot_p: np.ndarray   # (3,)
    omegadot: np.ndarray     # (3, 3)
    Omegadot: np.ndarray     # (3, 3)


@dataclass(frozen=True, eq=False)
class ControlInput:
    u: np.ndarray            # (3, 3) spatial thrust vectors [N]
    M: np.ndarray            # (3, 3) body moments [N·m]

    @classmethod
    def zeros(cls) -> "ControlInput":
        return cls(u=np.zeros((N_QUADS, 3)), M=np.zeros((N_QUADS, 3)))


@dataclass(frozen=True, eq=False)
class TensionSet:
    mu: np.ndarray           # (3, 3) tether tensions [N]

    def wrench(self, R_p: np.ndarray, p: SystemParams):
        """F = Σμ_i, τ = Σx̂_iR_pᵀμ_i."""
        F = self.mu.sum(axis=0)
        tau = sum(p.x_hat[i] @ R_p.T @ self.mu[i] for i in range(N_QUADS))
        return F, tau


# ═══════════════════════════════════════════════════════
#  CONTROLLER BOOKKEEPING
# ═══════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class ControllerMemory:
    """History for backward differences; empty on the first tick."""
    t: Optional[float] = None
    q_id: Optional[np.ndarray] = None        # (3, 3)
    R_id: Optional[np.ndarray] = None        # (3, 3, 3)
    Omega_id: Optional[np.ndarray] = None    # (3, 3)
    ticks: int = 0
    b1: np.ndarray = field(default_factory=lambda: np.tile([1.0, 0.0, 0.0], (N_QUADS, 1)))
    # consecutive ticks each R_id has been built from the same b1 without a hold
    streak: np.ndarray = field(default_factory=lambda: np.zeros(N_QUADS, dtype=int))

    @property
    def empty(self) -> bool:
        return self.t is None


@dataclass(frozen=True, eq=False)
class ControlTrace:
    U1: np.ndarray
    U2: np.ndarray
    F: np.ndarray
    tau: np.ndarray
    mu: np.ndarray           # (3, 3)
    u_par: np.ndarray        # (3, 3)
    u_perp: np.ndarray       # (3, 3)
    u: np.ndarray            # (3, 3) commanded thrust vectors
    q_id: np.ndarray         # (3, 3)
    omega_id: np.ndarray     # (3, 3)
    omegadot_id: np.ndarray  # (3, 3)
    R_id: np.ndarray         # (3, 3, 3)
    Omega_id: np.ndarray     # (3, 3)
    f: np.ndarray            # (3,)
    M: np.ndarray            # (3, 3)
    e_R: np.ndarray          # (3, 3)
    e_Omega: np.ndarray      # (3, 3)
