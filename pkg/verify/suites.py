"""
Verification Suites
===================
Named groups of property checks over every module. Each check reports
pass/fail, a one-line detail and, on failure, the first counterexample
with enough inputs to reproduce it.

Suites:
- algebra       hat/vee/exp identities, tension allocation
- conservation  cross-model oracle, passive energy, Euler–Lagrange, constraints, integrator order, power balance
- pfl           feedback-linearization round trip and the closed-loop ball equation
- lyapunov      V and V₂ properties, monotone decay, attitude bounds, acceptance metrics
- gains         𝒲′ certificate and its brute-force oracle
- boundary      quadrotor attitude-error decay and its ε trend

Every randomized check draws from numpy.random.default_rng(seed).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.linalg import null_space
from scipy.spatial.transform import Rotation

from control.pfl import pfl_inputs, force_torque_from_U, allocate_tensions, allocation_residual
from dynamics.plant import (
    full_dynamics, tensions, decoupled_dynamics, decoupled_from_wrench, mass_blocks, bias_terms,
    eom_residuals
)
from geom.so3 import hat, vee, exp_so3, rotation_residual, attitude_error_plate, rotation_about, E3
from models.errors import PlateSwarmError
from models.gains import Gains
from models.scenario import Scenario, IntegratorConfig, Mode, bundled_scenario
from models.state import SystemState, ControlInput, E, N_QUADS
from sim.runner import simulate
from verify.boundary_layer import boundary_layer_monitor
from verify.gains import (
    gain_condition_check, sampled_negative_definite, eigen_negative_definite, build_w_prime
)
from verify.lyapunov import (
    lyapunov_V, lyapunov_V2, attitude_bounds_from_initial, monotonicity_monitor, exponential_fit
)
from verify.oracles import euler_lagrange_residual, energy_audit, internal_dynamics_report
from verify.sampling import random_state, random_inputs, random_rotation, perturbed_target


@dataclass
class CheckResult:
    suite: str
    check: str
    passed: bool
    detail: str = ""
    counterexample: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"suite": self.suite, "check": self.check, "passed": self.passed,
                "detail": self.detail, "counterexample": self.counterexample}


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    scenario: Optional[Scenario] = None   # closed-loop run checked against the acceptance metrics
    n_random: int = 1000
    n_alloc: int = 10_000
    n_gain_sets: int = 100
    n_oracle_samples: int = 100_000
    passive_duration: float = 10.0

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, SystemState):
        return {k: _plain(v) for k, v in obj.__dict__.items()}
    if isinstance(obj, ControlInput):
        return {"u": obj.u.tolist(), "M": obj.M.tolist()}
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _sweep(suite: str, name: str, n: int, draw: Callable[[], dict],
           measure: Callable[..., float], tol: float) -> CheckResult:
    """Draw n inputs, keep the worst error and the first input over tol."""
    worst, first = 0.0, None
    for k in range(n):
        inputs = draw()
        try:
            err = float(measure(**inputs))
        except PlateSwarmError as e:
            err = float("inf")
            inputs = {**inputs, "error": str(e)}
        worst = max(worst, err)
        if first is None and not err <= tol:
            first = {"sample": k, "error": err, **_plain(inputs)}
    return CheckResult(suite, name, first is None, f"max error {worst:.3e} (tol {tol:.0e}, n={n})", first)


def _run(sc: Scenario, **kw):
    """simulate(), turning a failed run into a returned error."""
    try:
        return simulate(sc, **kw), None
    except PlateSwarmError as e:
        return getattr(e, "trajectory", None), e


def _reference() -> Scenario:
    return bundled_scenario("reference")


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


# ═══════════════════════════════════════════════════════
#  ALGEBRA
# ═══════════════════════════════════════════════════════

def suite_algebra(cfg: SuiteConfig) -> List[CheckResult]:
    rng = cfg.rng(1)
    p = _reference().params
    out = []

    def hat_vee(v, w):
        return max(np.max(np.abs(hat(v) @ w - np.cross(v, w))), np.max(np.abs(vee(hat(v)) - v)))

    out.append(_sweep("algebra", "hat/vee identities", cfg.n_random,
                      lambda: {"v": 3 * rng.standard_normal(3), "w": rng.standard_normal(3)}, hat_vee, 1e-12))

    def adjoint(R, v):
        return np.max(np.abs(hat(R @ v) - R @ hat(v) @ R.T))

    out.append(_sweep("algebra", "hat(Rv) = R hat(v) Rᵀ", cfg.n_random,
                      lambda: {"R": random_rotation(rng), "v": rng.standard_normal(3)}, adjoint, 1e-12))

    def trace_identity(A, x):
        lhs = hat(x) @ A + A.T @ hat(x)
        rhs = hat((np.trace(A) * np.eye(3) - A) @ x)
        return np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(A)))

    out.append(_sweep("algebra", "x̂A + Aᵀx̂ = ((trA·I − A)x)^", cfg.n_random,
                      lambda: {"A": rng.standard_normal((3, 3)), "x": rng.standard_normal(3)}, trace_identity, 1e-12))

    def exponential(v):
        R = exp_so3(v)
        return max(rotation_residual(R), abs(np.linalg.det(R) - 1.0),
                   np.max(np.abs(R - Rotation.from_rotvec(v).as_matrix())))

    out.append(_sweep("algebra", "exp_so3 is a rotation and matches the rotation vector", cfg.n_random,
                      lambda: {"v": rng.uniform(0, 3) * rng.standard_normal(3) / np.sqrt(3)}, exponential, 1e-9))

    def reconstruction(F, tau, R_p):
        return allocation_residual(allocate_tensions(F, tau, R_p, p), F, tau, R_p, p)

    out.append(_sweep("algebra", "allocation reconstruction A·μ = [R_pᵀF; τ]", cfg.n_alloc,
                      lambda: {"F": 10 * rng.standard_normal(3), "tau": rng.standard_normal(3),
                               "R_p": random_rotation(rng)},
                      reconstruction, 1e-10))

    kernel = null_space(p.attachment_matrix)

    def min_norm(F, tau, R_p, directions):
        stacked = (allocate_tensions(F, tau, R_p, p).mu @ R_p).ravel()
        base = stacked @ stacked
        worst = 0.0
        for d in directions:
            other = stacked + kernel @ d
            worst = max(worst, base - other @ other)
        return worst / max(1.0, base)

    out.append(_sweep("algebra", "allocation is minimum-norm against null-space perturbations", 100,
                      lambda: {"F": 10 * rng.standard_normal(3), "tau": rng.standard_normal(3),
                               "R_p": random_rotation(rng),
                               "directions": rng.standard_normal((100, kernel.shape[1]))},
                      min_norm, 1e-12))
    return out


# ═══════════════════════════════════════════════════════
#  CONSERVATION
# ═══════════════════════════════════════════════════════

def _passive(state: SystemState, dt: float, duration: float) -> Scenario:
    return _reference().with_(state0=state, mode=Mode.PASSIVE, name="passive-oracle",
                          integrator=IntegratorConfig(dt=dt, duration=duration))


def integrator_order_ratio(state: SystemState, duration: float = 1.0, h: float = 0.02) -> float:
    """err(h)/err(h/2) against an h/16 reference at t = duration."""
    final = {}
    for dt in (h, h / 2, h / 16):
        traj, err = _run(_passive(state, dt, duration))
        if err is not None:
            raise err
        final[dt] = traj.states[-1]
    ref = final[h / 16]
    coarse = np.max(np.abs(final[h] - ref))
    fine = np.max(np.abs(final[h / 2] - ref))
    return float(coarse / max(fine, 1e-300))


def hover_thrust(sc: Scenario) -> ControlInput:
    """Vertical thrusts carrying each quadrotor plus an equal share of plate and ball."""
    p = sc.params
    share = (p.m_p + p.m_b) * p.g / N_QUADS
    u = np.stack([(p.m[i] * p.g + share) * E3 for i in range(N_QUADS)])
    return ControlInput(u=u, M=np.zeros((N_QUADS, 3)))


def suite_conservation(cfg: SuiteConfig) -> List[CheckResult]:
    rng = cfg.rng(2)
    reference = _reference()
    p = reference.params
    out = []

    def cross_model(s, u):
        acc = full_dynamics(s, u, p)
        u_par = np.stack([s.q[i] * (s.q[i] @ u.u[i]) for i in range(N_QUADS)])
        mu = tensions(s, u_par, (acc.oddot_p, acc.Omegadot_p), p)
        rdd, odd, Wd = decoupled_dynamics(s, mu, p)
        full = np.concatenate([acc.rddot_b, acc.oddot_p, acc.Omegadot_p])
        res = eom_residuals(s, u, acc, p)
        worst_res = max(float(np.max(np.abs(v))) for v in res.values())
        return max(_rel(np.concatenate([rdd, odd, Wd]), full), worst_res / max(1.0, float(np.max(np.abs(full)))))

    out.append(_sweep("conservation", "full dynamics = tensions → decoupled dynamics", cfg.n_random,
                      lambda: {"s": random_state(rng), "u": random_inputs(rng)}, cross_model, 1e-8))

    s0 = random_state(rng, scale=0.5, upright=True)
    s0 = s0.replace(o_p=s0.o_p + 10.0 * E3)
    traj, err = _run(_passive(s0, 1e-3, cfg.passive_duration))
    if err is not None:
        out.append(CheckResult("conservation", "passive run", False, str(err), {"state0": _plain(s0)}))
        return out

    E_tot = traj.column("E_kin") + traj.column("E_pot")
    drift = np.abs(E_tot - E_tot[0]) / abs(E_tot[0])
    k = int(np.argmax(drift))
    out.append(CheckResult(
        "conservation", "passive energy drift < 1e-6", bool(drift[k] < 1e-6),
        f"max |E−E₀|/|E₀| = {drift[k]:.3e} over {cfg.passive_duration} s",
        None if drift[k] < 1e-6 else {"t": float(traj.t[k]), "state0": _plain(s0)},
    ))

    worst_c = max(float(np.max(traj.column(c))) for c in ("res_q_max", "res_omega_max", "res_R_max"))
    out.append(CheckResult("conservation", "manifold residuals < 1e-9", worst_c < 1e-9,
                           f"max residual {worst_c:.3e}", None if worst_c < 1e-9 else {"state0": _plain(s0)}))

    window = traj
    if len(traj) > 2001:
        window = _slice(traj, 2001)
    el = euler_lagrange_residual(window)
    el_bad = euler_lagrange_residual(window, g_scale=1.1)
    out.append(CheckResult("conservation", "Euler–Lagrange residual < 1e-4", el < 1e-4,
                           f"residual {el:.3e}", None if el < 1e-4 else {"state0": _plain(s0)}))
    out.append(CheckResult("conservation", "Euler–Lagrange oracle detects 10% gravity error", el_bad >= 10 * el,
                           f"corrupted {el_bad:.3e} vs {el:.3e}"))

    audit = energy_audit(window)
    out.append(CheckResult("conservation", "passive power balance < 1e-6 relative", audit.max_rel < 1e-6,
                           f"max gap {audit.max_abs:.3e}, relative {audit.max_rel:.3e}"))

    moving = SystemState.hover().replace(v_p=np.array([0.3, -0.2, 0.5]))
    sc_hover = _passive(moving, 1e-3, 1.0)
    traj_h, err = _run(sc_hover, inputs=hover_thrust(sc_hover))
    if err is None:
        audit_h = energy_audit(traj_h)
        ok = audit_h.max_rel < 1e-6 and audit_h.max_power > 1.0
        out.append(CheckResult("conservation", "power balance under constant thrust", ok,
                               f"relative gap {audit_h.max_rel:.3e}, power {audit_h.max_power:.3f} W"))
    else:
        out.append(CheckResult("conservation", "power balance under constant thrust", False, str(err)))

    mild = random_state(rng, scale=0.3, upright=True)
    try:
        ratio = integrator_order_ratio(mild)
        ok = 12.0 <= ratio <= 20.0
        out.append(CheckResult("conservation", "4th-order convergence (error ratio 12–20 per halving)", ok,
                               f"ratio {ratio:.2f}", None if ok else {"state0": _plain(mild)}))
    except PlateSwarmError as e:
        out.append(CheckResult("conservation", "4th-order convergence", False, str(e)))
    return out


def _slice(traj, n: int):
    """First n samples of a trajectory, as a new Trajectory."""
    return replace(
        traj, t=traj.t[:n], states=traj.states[:n], u=traj.u[:n], M=traj.M[:n], f=traj.f[:n],
        trace={k: v[:n] for k, v in traj.trace.items()},
        diagnostics={k: v[:n] for k, v in traj.diagnostics.items()},
    )


# ═══════════════════════════════════════════════════════
#  PFL
# ═══════════════════════════════════════════════════════

def suite_pfl(cfg: SuiteConfig) -> List[CheckResult]:
    rng = cfg.rng(3)
    reference = _reference()
    p, g = reference.params, reference.gains
    out = []

    def round_trip(s, U1, U2):
        F, tau = force_torque_from_U(s, U1, U2, p)
        rdd, odd, Wd = decoupled_from_wrench(s, F, tau, p)
        M11, M12, _ = mass_blocks(s, p)
        N1, _ = bias_terms(s, p)
        expected = -np.linalg.solve(M11, N1 + M12 @ np.concatenate([U1, U2]))
        return max(_rel(odd, U1), _rel(Wd, U2), _rel(rdd, expected))

    out.append(_sweep("pfl", "force_torque_from_U → decoupled dynamics returns (U₁, U₂)", cfg.n_random,
                      lambda: {"s": random_state(rng), "U1": 5 * rng.standard_normal(3),
                               "U2": 5 * rng.standard_normal(3)}, round_trip, 1e-8))

    def through_tensions(s, U1, U2):
        F, tau = force_torque_from_U(s, U1, U2, p)
        _, odd, Wd = decoupled_dynamics(s, allocate_tensions(F, tau, s.R_p, p), p)
        return max(_rel(odd, U1), _rel(Wd, U2))

    out.append(_sweep("pfl", "allocated tensions reproduce (U₁, U₂)", cfg.n_random,
                      lambda: {"s": random_state(rng), "U1": 5 * rng.standard_normal(3),
                               "U2": 5 * rng.standard_normal(3)}, through_tensions, 1e-8))

    def closed_loop_ball(s):
        U1, U2 = pfl_inputs(s, g, p)
        F, tau = force_torque_from_U(s, U1, U2, p)
        rdd, _, _ = decoupled_from_wrench(s, F, tau, p)
        expected = -g.k4 * s.r_b - g.k3 * s.rdot_b + E.T @ hat(E @ s.r_b) @ U2
        return _rel(rdd, expected)

    out.append(_sweep("pfl", "closed-loop ball: r̈_b = −k₄r_b − k₃ṙ_b + Eᵀ(Er_b)^U₂", cfg.n_random,
                      lambda: {"s": random_state(rng)}, closed_loop_ball, 1e-8))
    return out


# ═══════════════════════════════════════════════════════
#  LYAPUNOV
# ═══════════════════════════════════════════════════════

V2_FIT_TRANSIENT = 1.0
V2_FIT_FLOOR = 1e-8


def v2_decay_fit(traj, transient: float = V2_FIT_TRANSIENT, floor: float = V2_FIT_FLOOR):
    """(rate, r²) of log V₂ from `transient` until V₂ < floor·V₂(0)."""
    t, V2 = traj.t, traj.column("V2")
    start = int(np.searchsorted(t, t[0] + transient, side="left"))
    below = np.nonzero(V2 < floor * V2[0])[0]
    end = int(below[0]) if below.size else len(V2)
    return exponential_fit(t[start:end], V2[start:end])


def acceptance_metrics(traj) -> Dict[str, float]:
    s = traj.final_state
    res = max(float(np.max(traj.column(c))) for c in ("res_q_max", "res_omega_max", "res_R_max"))
    drift = internal_dynamics_report(traj, window=5.0)
    return {
        "r_b": float(np.linalg.norm(s.r_b)),
        "eta": float(np.linalg.norm(attitude_error_plate(s.R_p))),
        "height": float(abs(s.o_p @ E3)),
        "Omega_p": float(np.linalg.norm(s.Omega_p)),
        "v_spread": float(np.max(drift.velocity_spread)),
        "residual": res,
    }


ACCEPTANCE_LIMITS = {"r_b": 1e-2, "eta": 1e-3, "height": 1e-2, "Omega_p": 1e-3, "v_spread": 1e-3, "residual": 1e-9}


def suite_lyapunov(cfg: SuiteConfig) -> List[CheckResult]:
    rng = cfg.rng(4)
    reference = _reference()
    g = reference.gains
    out = []

    target = SystemState.hover()
    v0 = lyapunov_V(target, g)
    out.append(CheckResult("lyapunov", "V(target) = 0", abs(v0) < 1e-15, f"V = {v0:.3e}"))
    v2_pair = (lyapunov_V2(np.eye(3), np.zeros(3), g), lyapunov_V2(np.eye(3), np.array([1.0, 0, 0]), g))
    ok = abs(v2_pair[0]) < 1e-15 and abs(v2_pair[1] - 0.5) < 1e-15
    out.append(CheckResult("lyapunov", "V₂(I, 0) = 0 and V₂(I, e₁) = ½", ok, f"{v2_pair}"))

    n_pos = cfg.n_random * 10
    V_min, first = np.inf, None
    for k in range(n_pos):
        s = perturbed_target(rng)
        V = lyapunov_V(s, g, c1=0.01, c2=0.01)
        V_min = min(V_min, V)
        if first is None and V <= 0.0:
            first = {"sample": k, "V": V, "s": _plain(s)}
    out.append(CheckResult("lyapunov", "V > 0 near the target (c₁ = c₂ = 0.01)", first is None,
                           f"min V {V_min:.3e} over {n_pos} perturbations", first))

    reduced = bundled_scenario("hover").with_(
        state0=SystemState.hover().replace(r_b=np.array([0.5, -0.3]), rdot_b=np.array([0.2, 0.1]),
                                           o_p=np.array([0.0, 0.0, 0.2])),
        mode=Mode.REDUCED, integrator=IntegratorConfig(dt=1e-3, duration=5.0), name="reduced-level",
    )
    traj, err = _run(reduced)
    if err is None:
        mono = monotonicity_monitor(traj.t, traj.column("V"), transient=0.0)
        out.append(CheckResult("lyapunov", "V non-increasing on the reduced system", mono.monotone,
                               f"worst increase {mono.worst_increase:.3e} (tol {mono.tolerance:.1e})",
                               None if mono.monotone else {"sample": mono.first_violation}))
    else:
        out.append(CheckResult("lyapunov", "V non-increasing on the reduced system", False, str(err)))

    att = bundled_scenario("attitude_only")
    traj, err = _run(att)
    if err is None:
        V2 = traj.column("V2")
        mono = monotonicity_monitor(traj.t, V2, transient=0.0)
        out.append(CheckResult("lyapunov", "V₂ non-increasing on attitude-only", mono.monotone,
                               f"worst increase {mono.worst_increase:.3e}",
                               None if mono.monotone else {"sample": mono.first_violation}))
        rate, r2 = v2_decay_fit(traj)
        out.append(CheckResult("lyapunov", "V₂ exponential decay (R² > 0.99)", r2 > 0.99 and rate > 0,
                               f"rate {rate:.3f} 1/s, R² = {r2:.5f}"))
        C1, C2 = attitude_bounds_from_initial(att.state0, att.gains)
        states = [traj.state(k) for k in range(len(traj))]
        W_max = max(float(np.linalg.norm(s.Omega_p)) for s in states)
        eta_max = max(float(np.linalg.norm(attitude_error_plate(s.R_p))) for s in states)
        ok = W_max <= C1 and eta_max <= C2
        out.append(CheckResult("lyapunov", "C₁, C₂ bound the observed ‖Ω_p‖, ‖η‖", ok,
                               f"‖Ω_p‖ ≤ {W_max:.3f} ≤ C₁ = {C1:.3f}, ‖η‖ ≤ {eta_max:.3f} ≤ C₂ = {C2:.3f}"))
    else:
        out.append(CheckResult("lyapunov", "attitude-only run", False, str(err)))

    if cfg.scenario is not None and Mode(cfg.scenario.mode) == Mode.CLOSED_LOOP:
        out.extend(acceptance_checks(cfg.scenario))
    return out


def acceptance_checks(sc: Scenario) -> List[CheckResult]:
    """Terminal metrics and V monotonicity of one closed-loop run."""
    traj, err = _run(sc)
    if err is not None:
        return [CheckResult("lyapunov", f"{sc.name}: closed-loop run", False, str(err))]
    out = []
    mono = monotonicity_monitor(traj.t, traj.column("V"), transient=0.5)
    out.append(CheckResult("lyapunov", f"{sc.name}: V non-increasing after 0.5 s", mono.monotone,
                           f"worst increase {mono.worst_increase:.3e} (tol {mono.tolerance:.1e})",
                           None if mono.monotone else {"sample": mono.first_violation,
                                                       "t": float(traj.t[mono.first_violation])}))
    metrics = acceptance_metrics(traj)
    for key, limit in ACCEPTANCE_LIMITS.items():
        out.append(CheckResult("lyapunov", f"{sc.name}: {key} < {limit:.0e}", metrics[key] < limit,
                               f"{key} = {metrics[key]:.3e}"))
    return out


# ═══════════════════════════════════════════════════════
#  GAINS
# ═══════════════════════════════════════════════════════

def random_gains(rng: np.random.Generator) -> Gains:
    k = rng.uniform(0.5, 20.0, 8)
    return Gains(k1=k[0], k2=k[1], k3=k[2], k4=k[3], k5=k[4], k6=k[5], k7=k[6], k8=k[7],
                 c0=rng.uniform(0.01, min(0.99, k[0] * 0.99)),
                 c1=rng.uniform(0.01, 2.0), c2=rng.uniform(0.01, 2.0))


def random_definite_pair(rng: np.random.Generator, n: int = 6):
    """A symmetric matrix that is negative definite or has one clearly positive eigenvalue."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = -rng.uniform(0.5, 3.0, n)
    if rng.uniform() < 0.5:
        lam[0] = rng.uniform(1.0, 3.0)
    return Q @ np.diag(lam) @ Q.T


def suite_gains(cfg: SuiteConfig) -> List[CheckResult]:
    rng = cfg.rng(5)
    reference = _reference()
    g = reference.gains
    out = []

    C1, C2 = attitude_bounds_from_initial(reference.state0, g)
    cert = gain_condition_check(g, g.c0, g.c1, g.c2, C1, C2)
    agrees = cert.accepted == sampled_negative_definite(build_w_prime(g, g.c1, g.c2, C1, C2),
                                                        cfg.n_oracle_samples, rng)
    spectrum = ", ".join(f"{v:.3f}" for v in cert.eigenvalues)
    out.append(CheckResult(
        "gains", "default certificate agrees with both oracles", agrees and cert.oracle_agrees,
        f"{cert.verdict.value}: spectrum [{spectrum}]" + (f"; {cert.reason}" if cert.reason else ""),
    ))
    if not cert.accepted:
        print(f"[Verify] ⚠️ 𝒲′ rejected for the default gains: {cert.reason}")

    first, disagreements = None, 0
    for k in range(cfg.n_gain_sets):
        gk = random_gains(rng)
        C1k, C2k = rng.uniform(0.0, 3.0), rng.uniform(0.0, 1.0)
        ck = gain_condition_check(gk, gk.c0, gk.c1, gk.c2, C1k, C2k)
        brute = sampled_negative_definite(build_w_prime(gk, gk.c1, gk.c2, C1k, C2k), cfg.n_oracle_samples, rng)
        if ck.accepted != brute or not ck.oracle_agrees:
            disagreements += 1
            if first is None:
                first = {"sample": k, "gains": gk.model_dump(), "C1": C1k, "C2": C2k}
    out.append(CheckResult("gains", "𝒲′ verdicts agree with brute force on random gain sets", disagreements == 0,
                           f"{disagreements} disagreements in {cfg.n_gain_sets}", first))

    first, disagreements = None, 0
    for k in range(cfg.n_gain_sets):
        W = random_definite_pair(rng)
        if eigen_negative_definite(W) != sampled_negative_definite(W, cfg.n_oracle_samples, rng):
            disagreements += 1
            if first is None:
                first = {"sample": k, "W": W.tolist()}
    out.append(CheckResult("gains", "eigenvalue and sampling oracles agree on synthetic matrices",
                           disagreements == 0, f"{disagreements} disagreements in {cfg.n_gain_sets}", first))

    edge = [gain_condition_check(g, g.c0, g.c1, g.k1, C1, C2),
            gain_condition_check(g.with_(k5=1e-9), g.c0, g.c1, g.c2, C1, C2)]
    out.append(CheckResult("gains", "boundary gains rejected (c₂ = k₁, k₅ → 0)",
                           not any(c.accepted for c in edge), "; ".join(c.reason or "" for c in edge)))
    return out


# ═══════════════════════════════════════════════════════
#  BOUNDARY LAYER
# ═══════════════════════════════════════════════════════

SWEEP_EPS = (0.2, 0.1, 0.05)


def tilted_hover(eps: float, tilt: float = 0.3, duration: float = 1.5) -> Scenario:
    """Closed-loop hover with every quadrotor rolled by `tilt` rad."""
    sc = bundled_scenario("hover")
    R_tilt = rotation_about([1.0, 0.0, 0.0], tilt)
    return sc.with_(
        gains=sc.gains.with_(eps=eps),
        state0=sc.state0.replace(R=np.tile(R_tilt, (N_QUADS, 1, 1))),
        integrator=IntegratorConfig(dt=1e-3, duration=duration),
        name=f"tilted-hover-eps{eps}",
    )


def boundary_rate(sc: Scenario) -> Optional[float]:
    traj, err = _run(sc)
    if err is not None:
        return None
    return boundary_layer_monitor(traj).e_R_max.rate


def suite_boundary(cfg: SuiteConfig) -> List[CheckResult]:
    out = []
    hover = bundled_scenario("hover").with_(integrator=IntegratorConfig(dt=1e-3, duration=1.0))
    traj, err = _run(hover)
    if err is None:
        eR = float(np.max(np.linalg.norm(traj.trace["e_R"], axis=2)))
        eW = float(np.max(np.linalg.norm(traj.trace["e_Omega"], axis=2)))
        out.append(CheckResult("boundary", "errors stay < 1e-6 at the hover equilibrium", max(eR, eW) < 1e-6,
                               f"max ‖e_R‖ = {eR:.3e}, max ‖e_Ω‖ = {eW:.3e}"))
    else:
        out.append(CheckResult("boundary", "hover equilibrium run", False, str(err)))

    with ThreadPoolExecutor(max_workers=len(SWEEP_EPS)) as pool:
        rates = list(pool.map(boundary_rate, [tilted_hover(e) for e in SWEEP_EPS]))
    converged = [(e, r) for e, r in zip(SWEEP_EPS, rates) if r is not None]
    increasing = all(b[1] > a[1] for a, b in zip(converged, converged[1:]))
    detail = ", ".join(f"ε={e}: {'diverged' if r is None else f'{r:.1f} 1/s'}" for e, r in zip(SWEEP_EPS, rates))
    out.append(CheckResult("boundary", "e_R decay rate increases as ε decreases",
                           increasing and len(converged) >= 2, detail))
    return out


# ═══════════════════════════════════════════════════════
#  REGISTRY
# ═══════════════════════════════════════════════════════

SUITES: Dict[str, Callable[[SuiteConfig], List[CheckResult]]] = {
    "algebra": suite_algebra,
    "conservation": suite_conservation,
    "pfl": suite_pfl,
    "lyapunov": suite_lyapunov,
    "gains": suite_gains,
    "boundary": suite_boundary,
}


def run_suites(names: List[str], cfg: SuiteConfig) -> List[CheckResult]:
    """Run the named suites ("all" expands) concurrently; results keep suite order."""
    if "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    with ThreadPoolExecutor(max_workers=len(names)) as pool:
        batches = list(pool.map(lambda n: SUITES[n](cfg), names))
    return [r for batch in batches for r in batch]
