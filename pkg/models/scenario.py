"""
Plate Swarm Scenario Files
==========================
JSON schema for a simulation scenario, and its conversion to the numeric
value types in models.state.

Provides:
- Mode: closed-loop | passive | attitude-only | reduced
- IntegratorConfig: dt, duration, control decimation, projection tolerance
- ScenarioFile: the on-disk document (unknown keys rejected)
- Scenario: validated params + gains + initial state + integrator + mode
- load_scenario / save_scenario
"""

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from geom.so3 import project_to_so3, rotation_residual
from geom.tolerances import get_tolerances
from models.errors import ScenarioError, RankDeficientAttachment
from models.gains import Gains
from models.state import SystemParams, SystemState, N_QUADS

Vec2 = Tuple[float, float]
Vec3 = Tuple[float, float, float]
Mat3 = Tuple[float, float, float, float, float, float, float, float, float]


# ═══════════════════════════════════════════════════════
#  PYDANTIC SCHEMA
# ═══════════════════════════════════════════════════════

class Mode(str, Enum):
    """What drives the plant."""
    CLOSED_LOOP = "closed-loop"      # full control stack
    PASSIVE = "passive"              # u_i = 0, M_i = 0
    ATTITUDE_ONLY = "attitude-only"  # plate attitude under Ω̇_p = U₂ only
    REDUCED = "reduced"              # ball–plate under exact PFL, ε → 0


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class QuadrotorParams(_Strict):
    m: float = Field(description="Quadrotor mass [kg]")
    J: Mat3 = Field(description="Inertia, 9 row-major numbers [kg·m²]")
    l: float = Field(description="Cable length [m]")
    x: Vec3 = Field(description="Attachment point in the plate frame [m]")


class ParamsSection(_Strict):
    m_p: float = Field(description="Plate mass [kg]")
    m_b: float = Field(description="Ball mass [kg]")
    J_p: Mat3 = Field(description="Plate inertia, 9 row-major numbers [kg·m²]")
    g: float = Field(9.81, description="Gravity [m/s²]")
    quadrotors: List[QuadrotorParams] = Field(min_length=N_QUADS, max_length=N_QUADS)


class TetherState(_Strict):
    q: Vec3 = Field(description="Unit vector along the cable")
    omega: Vec3 = Field((0.0, 0.0, 0.0), description="Cable angular velocity, inertial [rad/s]")


class QuadrotorState(_Strict):
    R: Mat3 = Field((1, 0, 0, 0, 1, 0, 0, 0, 1), description="Attitude, 9 row-major numbers")
    Omega: Vec3 = Field((0.0, 0.0, 0.0), description="Body rate [rad/s]")


class InitialStateSection(_Strict):
    o_p: Vec3 = (0.0, 0.0, 0.0)
    v_p: Vec3 = (0.0, 0.0, 0.0)
    R_p: Mat3 = (1, 0, 0, 0, 1, 0, 0, 0, 1)
    Omega_p: Vec3 = (0.0, 0.0, 0.0)
    r_b: Vec2 = (0.0, 0.0)
    rdot_b: Vec2 = (0.0, 0.0)
    tethers: List[TetherState] = Field(min_length=N_QUADS, max_length=N_QUADS)
    quadrotors: List[QuadrotorState] = Field(
        default_factory=lambda: [QuadrotorState() for _ in range(N_QUADS)],
        min_length=N_QUADS, max_length=N_QUADS,
    )


class IntegratorConfig(_Strict):
    """Fixed-step integration settings."""
    dt: float = Field(1e-3, gt=0, description="Step size [s]")
    duration: float = Field(30.0, ge=0, description="Simulated time [s]")
    decimation: int = Field(1, ge=1, description="Integrator steps per control update (zero-order hold)")
    projection_tol: float = Field(1e-12, gt=0, description="Unit-norm drift tolerated after projection")
    method: str = Field("rk4-lie", pattern="^rk4-lie$", description="Integration scheme tag")

    @model_validator(mode="after")
    def _duration_covers_dt(self):
        if 0 < self.duration < self.dt:
            raise ValueError(f"duration {self.duration} is shorter than dt {self.dt}")
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


class ScenarioFile(_Strict):
    """A scenario as stored on disk."""
    name: str = "scenario"
    params: ParamsSection
    gains: Gains = Field(default_factory=Gains)
    initial_state: InitialStateSection
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    mode: Mode = Mode.CLOSED_LOOP


# ═══════════════════════════════════════════════════════
#  VALIDATED SCENARIO
# ═══════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class Scenario:
    params: SystemParams
    gains: Gains
    state0: SystemState
    integrator: IntegratorConfig
    mode: Mode = Mode.CLOSED_LOOP
    name: str = "scenario"

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


def _mat(values) -> np.ndarray:
    return np.array(values, dtype=float).reshape(3, 3)


def _unit(v: np.ndarray, where: str) -> np.ndarray:
    """Repair small unit-norm defects (rounded published values), reject the rest."""
    tol = get_tolerances()
    defect = abs(np.linalg.norm(v) - 1.0)
    if defect <= tol.projection:
        return v
    if defect <= tol.renormalize:
        print(f"[Scenario] ⚠️ {where}: |‖q‖ − 1| = {defect:.2e}, renormalized")
        return v / np.linalg.norm(v)
    raise ScenarioError(f"not a unit vector (|‖q‖ − 1| = {defect:.3e})", where)


def _rotation(R: np.ndarray, where: str) -> np.ndarray:
    tol = get_tolerances()
    residual = rotation_residual(R)
    if np.linalg.det(R) <= 0:
        raise ScenarioError("matrix is not a proper rotation (det ≤ 0)", where)
    if residual <= tol.projection:
        return R
    if residual <= tol.renormalize:
        print(f"[Scenario] ⚠️ {where}: ‖RᵀR − I‖ = {residual:.2e}, re-orthonormalized")
        return project_to_so3(R)
    raise ScenarioError(f"not a rotation (‖RᵀR − I‖ = {residual:.3e})", where)


def _tangent(omega: np.ndarray, q: np.ndarray, where: str) -> np.ndarray:
    tol = get_tolerances()
    along = float(omega @ q)
    if abs(along) <= tol.projection:
        return omega
    if abs(along) <= tol.renormalize:
        print(f"[Scenario] ⚠️ {where}: ω·q = {along:.2e}, projected out")
        return omega - along * q
    raise ScenarioError(f"tether rate has a component along the tether (ω·q = {along:.3e})", where)


def scenario_from_file(doc: ScenarioFile) -> Scenario:
    """Convert a parsed document into validated numeric types."""
    pp = doc.params
    params = SystemParams(
        m_p=pp.m_p, m_b=pp.m_b, J_p=_mat(pp.J_p),
        m=np.array([qp.m for qp in pp.quadrotors]),
        J=np.stack([_mat(qp.J) for qp in pp.quadrotors]),
        l=np.array([qp.l for qp in pp.quadrotors]),
        x=np.array([qp.x for qp in pp.quadrotors], dtype=float),
        g=pp.g,
    ).validated()

    s = doc.initial_state
    q = np.stack([_unit(np.array(t.q, dtype=float), f"initial_state.tethers[{i}].q")
                  for i, t in enumerate(s.tethers)])
    omega = np.stack([_tangent(np.array(t.omega, dtype=float), q[i], f"initial_state.tethers[{i}].omega")
                      for i, t in enumerate(s.tethers)])
    state0 = SystemState(
        o_p=np.array(s.o_p, dtype=float),
        v_p=np.array(s.v_p, dtype=float),
        R_p=_rotation(_mat(s.R_p), "initial_state.R_p"),
        Omega_p=np.array(s.Omega_p, dtype=float),
        r_b=np.array(s.r_b, dtype=float),
        rdot_b=np.array(s.rdot_b, dtype=float),
        q=q,
        omega=omega,
        R=np.stack([_rotation(_mat(qs.R), f"initial_state.quadrotors[{i}].R")
                    for i, qs in enumerate(s.quadrotors)]),
        Omega=np.array([qs.Omega for qs in s.quadrotors], dtype=float),
    )
    state0.check()
    return Scenario(params=params, gains=doc.gains, state0=state0,
                    integrator=doc.integrator, mode=doc.mode, name=doc.name)


def scenario_to_file(sc: Scenario) -> ScenarioFile:
    p, s = sc.params, sc.state0

    def flat(a):
        return tuple(float(v) for v in np.ravel(a))

    return ScenarioFile(
        name=sc.name,
        params=ParamsSection(
            m_p=p.m_p, m_b=p.m_b, J_p=flat(p.J_p), g=p.g,
            quadrotors=[QuadrotorParams(m=float(p.m[i]), J=flat(p.J[i]), l=float(p.l[i]), x=flat(p.x[i]))
                        for i in range(N_QUADS)],
        ),
        gains=sc.gains,
        initial_state=InitialStateSection(
            o_p=flat(s.o_p), v_p=flat(s.v_p), R_p=flat(s.R_p), Omega_p=flat(s.Omega_p),
            r_b=flat(s.r_b), rdot_b=flat(s.rdot_b),
            tethers=[TetherState(q=flat(s.q[i]), omega=flat(s.omega[i])) for i in range(N_QUADS)],
            quadrotors=[QuadrotorState(R=flat(s.R[i]), Omega=flat(s.Omega[i])) for i in range(N_QUADS)],
        ),
        integrator=sc.integrator,
        mode=sc.mode,
    )


# ═══════════════════════════════════════════════════════
#  FILE I/O
# ═══════════════════════════════════════════════════════

def _line_of(text: str, loc: tuple) -> Optional[int]:
    """Best-effort line number for a pydantic error location."""
    pos = 0
    found = False
    for part in loc:
        if isinstance(part, str):
            hit = text.find(f'"{part}"', pos)
            if hit < 0:
                break
            pos, found = hit, True
    return text.count("\n", 0, pos) + 1 if found else None


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e.msg}", source, e.lineno)
    try:
        doc = ScenarioFile.model_validate(raw)
    except ValidationError as e:
        err = e.errors()[0]
        loc = ".".join(str(part) for part in err["loc"])
        raise ScenarioError(err["msg"], f"{source}:{loc}", _line_of(text, err["loc"]))
    try:
        return scenario_from_file(doc)
    except ScenarioError as e:
        raise ScenarioError(e.message, f"{source}:{e.location}", _line_of(text, tuple(e.location.replace("[", ".").split("."))))
    except RankDeficientAttachment as e:
        raise ScenarioError(str(e), f"{source}:params.quadrotors", _line_of(text, ("params", "quadrotors")))


SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def bundled_scenario(name: str) -> Scenario:
    """One of the scenario files shipped under scenarios/, by stem."""
    return load_scenario(SCENARIO_DIR / f"{name}.json")


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise ScenarioError("file not found", str(path))
    sc = parse_scenario(path.read_text(encoding="utf-8"), str(path))
    print(f"[Scenario] Loaded '{sc.name}' ({sc.mode.value}, dt={sc.integrator.dt}, T={sc.integrator.duration})")
    return sc


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_file(sc).model_dump(mode="json"), indent=2)


def save_scenario(sc: Scenario, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_scenario(sc), encoding="utf-8")
    return path
