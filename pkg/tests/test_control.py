"""
Verification of the Control Stack
=================================
Tests:
1. PFL inputs and the linearizing force/torque map.
2. Min-norm tension allocation.
3. Parallel / perpendicular tether thrusts and the desired tether direction.
4. Quadrotor attitude setpoint and moment.
5. One full control tick at hover, with its degeneracy fallbacks.
6. Tether references along the designed flow; attitude-difference restarts.
"""
from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import null_space

from control.pfl import (
    pfl_inputs, force_torque_from_U, schur_complement, allocate_tensions, allocation_residual,
    designed_accelerations, desired_tensions
)
from control.pipeline import (
    compute_controls, tether_references, _attitude_setpoint, _tether_direction, B1_FALLBACK
)
from control.quadrotor import quadrotor_attitude_setpoint, quadrotor_inputs
from control.tethers import parallel_controls, desired_tether_direction, perpendicular_controls
from dynamics.plant import decoupled_from_wrench, decoupled_dynamics
from geom.so3 import E3, hat, rotation_about, is_rotation
from models.errors import DegenerateTension, DegenerateThrust, GimbalDegeneracy
from models.state import Accelerations, ControllerMemory, TensionSet, E, N_QUADS
from sim.integrator import rk4_lie_step
from verify.sampling import random_state, random_rotation, random_unit

E1 = np.array([1.0, 0.0, 0.0])
ZERO = np.zeros(3)


# --- PFL ---

def test_pfl_inputs_vanish_at_target(hover, gains, params):
    U1, U2 = pfl_inputs(hover, gains, params)
    assert np.allclose(U1, 0.0, atol=1e-15)
    assert np.allclose(U2, 0.0, atol=1e-15)


def test_pfl_rate_damping(hover, gains, params):
    _, U2 = pfl_inputs(hover.replace(Omega_p=np.array([0.0, 0.0, 1.0])), gains, params)
    assert np.allclose(U2, [0.0, 0.0, -gains.k1])


def test_pfl_ball_position_term(hover, gains, params):
    U1, _ = pfl_inputs(hover.replace(r_b=np.array([0.1, 0.0])), gains, params)
    assert np.allclose(U1, [0.1 * gains.k4, 0.0, 0.0], atol=1e-12)


def test_gravity_feedforward_at_target(hover, params):
    F, tau = force_torque_from_U(hover, ZERO, ZERO, params)
    assert np.allclose(F, (params.m_p + params.m_b) * params.g * E3, atol=1e-12)
    assert np.allclose(tau, 0.0, atol=1e-12)


def test_pfl_round_trip(rng, params):
    for _ in range(200):
        s = random_state(rng)
        U1, U2 = 5 * rng.standard_normal(3), 5 * rng.standard_normal(3)
        F, tau = force_torque_from_U(s, U1, U2, params)
        _, odd, Wd = decoupled_from_wrench(s, F, tau, params)
        assert np.allclose(odd, U1, rtol=0.0, atol=1e-8 * max(1.0, np.max(np.abs(U1))))
        assert np.allclose(Wd, U2, rtol=0.0, atol=1e-8 * max(1.0, np.max(np.abs(U2))))


def test_pfl_round_trip_through_allocation(rng, params):
    for _ in range(100):
        s = random_state(rng)
        U1, U2 = rng.standard_normal(3), rng.standard_normal(3)
        F, tau = force_torque_from_U(s, U1, U2, params)
        _, odd, Wd = decoupled_dynamics(s, allocate_tensions(F, tau, s.R_p, params), params)
        assert np.allclose(odd, U1, atol=1e-8)
        assert np.allclose(Wd, U2, atol=1e-8)


def test_closed_loop_ball_equation(rng, gains, params):
    for _ in range(200):
        s = random_state(rng)
        U1, U2 = pfl_inputs(s, gains, params)
        F, tau = force_torque_from_U(s, U1, U2, params)
        rdd, _, _ = decoupled_from_wrench(s, F, tau, params)
        expected = -gains.k4 * s.r_b - gains.k3 * s.rdot_b + E.T @ hat(E @ s.r_b) @ U2
        assert np.allclose(rdd, expected, rtol=0.0, atol=1e-8 * max(1.0, np.max(np.abs(expected))))


def test_schur_complement_positive_definite(rng, params):
    for _ in range(200):
        S = schur_complement(random_state(rng), params)
        assert np.min(np.linalg.eigvalsh(0.5 * (S + S.T))) > 0.0


# --- allocation ---

def test_symmetric_allocation(params):
    mu = allocate_tensions(3 * E3, ZERO, np.eye(3), params)
    assert np.allclose(mu.mu, np.tile(E3, (N_QUADS, 1)), atol=1e-12)


def test_allocation_reconstruction(rng, params):
    for _ in range(1000):
        F, tau, R = 10 * rng.standard_normal(3), rng.standard_normal(3), random_rotation(rng)
        mu = allocate_tensions(F, tau, R, params)
        assert allocation_residual(mu, F, tau, R, params) < 1e-10
        F_back, tau_back = mu.wrench(R, params)
        assert np.allclose(F_back, F, atol=1e-10) and np.allclose(tau_back, tau, atol=1e-10)


def test_allocation_is_minimum_norm(rng, params):
    kernel = null_space(params.attachment_matrix)
    for _ in range(20):
        F, tau, R = 10 * rng.standard_normal(3), rng.standard_normal(3), random_rotation(rng)
        stacked = (allocate_tensions(F, tau, R, params).mu @ R).ravel()
        base = stacked @ stacked
        for d in rng.standard_normal((50, kernel.shape[1])):
            other = stacked + kernel @ d
            assert other @ other >= base - 1e-12 * max(1.0, base)


# --- tether thrusts ---

def test_parallel_controls_self_support(hover, params):
    u_par = parallel_controls(hover, TensionSet(mu=np.zeros((N_QUADS, 3))), ZERO, ZERO, params)
    assert np.allclose(u_par, np.stack([params.m[i] * params.g * E3 for i in range(N_QUADS)]))


def test_parallel_controls_carry_tension(hover, params):
    mu = np.tile(2.0 * E3, (N_QUADS, 1))
    u_par = parallel_controls(hover, TensionSet(mu=mu), ZERO, ZERO, params)
    assert np.allclose(u_par, mu + np.stack([params.m[i] * params.g * E3 for i in range(N_QUADS)]))


def test_parallel_controls_centripetal_term(hover, params):
    s = hover.replace(omega=np.tile(E1, (N_QUADS, 1)))
    u_par = parallel_controls(s, TensionSet(mu=np.zeros((N_QUADS, 3))), ZERO, ZERO, params)
    for i in range(N_QUADS):
        assert np.allclose(u_par[i], params.m[i] * (params.g - params.l[i]) * E3)


def test_desired_tether_direction():
    assert np.allclose(desired_tether_direction(np.array([0.0, 0.0, 5.0])), [0.0, 0.0, 1.0])
    assert np.allclose(desired_tether_direction(np.array([3.0, 0.0, 4.0])), [0.6, 0.0, 0.8])
    with pytest.raises(DegenerateTension):
        desired_tether_direction(np.array([0.0, 0.0, 1e-12]))


def test_perpendicular_controls_aligned(hover, gains, params):
    u_perp = perpendicular_controls(hover, hover.q, np.zeros((N_QUADS, 3)), np.zeros((N_QUADS, 3)),
                                    gains, params)
    assert np.allclose(u_perp, 0.0, atol=1e-12)


def test_perpendicular_controls_alignment_error(hover, gains, params):
    q_id = np.tile(E1, (N_QUADS, 1))
    u_perp = perpendicular_controls(hover, q_id, np.zeros((N_QUADS, 3)), np.zeros((N_QUADS, 3)),
                                    gains, params)
    for i in range(N_QUADS):
        assert np.allclose(u_perp[i], params.m[i] * params.l[i] * gains.k7 * E1, atol=1e-12)


def test_perpendicular_controls_orthogonal_to_tether(rng, gains, params):
    for _ in range(200):
        s = random_state(rng)
        q_id = np.stack([random_unit(rng) for _ in range(N_QUADS)])
        u_perp = perpendicular_controls(s, q_id, rng.standard_normal((N_QUADS, 3)),
                                        rng.standard_normal((N_QUADS, 3)), gains, params,
                                        U1=rng.standard_normal(3), U2=rng.standard_normal(3))
        for i in range(N_QUADS):
            assert abs(s.q[i] @ u_perp[i]) < 1e-10 * max(1.0, np.linalg.norm(u_perp[i]))


# --- quadrotor layer ---

def test_setpoint_for_vertical_thrust():
    assert np.allclose(quadrotor_attitude_setpoint(np.array([0.0, 0.0, 9.81]), E1), np.eye(3), atol=1e-15)


def test_setpoint_for_inverted_thrust():
    R = quadrotor_attitude_setpoint(np.array([0.0, 0.0, -9.81]), E1)
    assert np.allclose(R[:, 2], -E3)
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)
    assert is_rotation(R)


def test_setpoint_third_column_is_thrust_direction(rng):
    for _ in range(200):
        u = 10 * rng.standard_normal(3)
        if abs(u @ E1) > 0.99 * np.linalg.norm(u):
            continue
        R = quadrotor_attitude_setpoint(u, E1)
        assert np.array_equal(R[:, 2], u / np.linalg.norm(u))
        assert is_rotation(R)


def test_setpoint_degeneracies():
    with pytest.raises(GimbalDegeneracy):
        quadrotor_attitude_setpoint(np.array([5.0, 0.0, 0.0]), E1)
    with pytest.raises(DegenerateThrust):
        quadrotor_attitude_setpoint(np.zeros(3), E1)


def test_quadrotor_moment_zero_when_tracking(rng, gains, params):
    R = random_rotation(rng)
    _, M, _, _ = quadrotor_inputs(R, ZERO, R, ZERO, ZERO, params.J[0], gains)
    assert np.allclose(M, 0.0, atol=1e-12)


def test_quadrotor_rate_damping(gains, params):
    _, M, _, _ = quadrotor_inputs(np.eye(3), E3.copy(), np.eye(3), ZERO, ZERO, params.J[0], gains)
    assert np.allclose(M, -(gains.kOmega / gains.eps) * E3, atol=1e-12)


def test_quadrotor_gains_scale_with_eps(gains, params):
    R = rotation_about(E1, 0.1)
    _, M_a, _, _ = quadrotor_inputs(R, ZERO, np.eye(3), ZERO, ZERO, params.J[0], gains)
    _, M_b, _, _ = quadrotor_inputs(R, ZERO, np.eye(3), ZERO, ZERO, params.J[0], gains.with_(eps=gains.eps / 2))
    assert np.allclose(M_b, 4.0 * M_a, rtol=1e-12)
    W = np.array([0.0, 0.0, 0.7])
    _, M_a, _, _ = quadrotor_inputs(np.eye(3), W, np.eye(3), ZERO, ZERO, params.J[0], gains)
    _, M_b, _, _ = quadrotor_inputs(np.eye(3), W, np.eye(3), ZERO, ZERO, params.J[0], gains.with_(eps=gains.eps / 2))
    assert np.allclose(M_b, 2.0 * M_a, rtol=1e-12)


def test_quadrotor_thrust_is_norm(gains, params):
    u = np.array([1.0, -2.0, 9.0])
    f, _, _, _ = quadrotor_inputs(np.eye(3), ZERO, np.eye(3), ZERO, ZERO, params.J[0], gains, u_i=u)
    assert f == np.linalg.norm(u)


# --- pipeline ---

def test_control_tick_at_hover(hover, gains, params):
    ctrl, trace, mem = compute_controls(hover, gains, ControllerMemory(), params, 1e-3)
    assert np.allclose(trace.U1, 0.0, atol=1e-15) and np.allclose(trace.U2, 0.0, atol=1e-15)
    assert np.all(trace.f > 0.0)
    assert np.allclose(trace.M, 0.0, atol=1e-9)
    share = (params.m_p + params.m_b) * params.g / N_QUADS
    assert np.allclose(trace.f, params.m * params.g + share, rtol=1e-12)
    assert np.allclose(ctrl.u, trace.f[:, None] * E3, atol=1e-12)
    assert mem.ticks == 1 and mem.t == 0.0


def test_control_trace_identities(gains, reference):
    s = reference.state0
    _, trace, mem = compute_controls(s, gains, ControllerMemory(), reference.params, 1e-3)
    assert np.array_equal(trace.u, trace.u_par + trace.u_perp)
    for i in range(N_QUADS):
        assert trace.f[i] == np.linalg.norm(trace.u[i])
        assert abs(s.q[i] @ trace.u_perp[i]) < 1e-10 * max(1.0, np.linalg.norm(trace.u_perp[i]))
        assert np.allclose(np.cross(trace.u_par[i], s.q[i]), 0.0, atol=1e-10 * max(1.0, np.linalg.norm(trace.u_par[i])))
        assert is_rotation(trace.R_id[i])
        assert np.allclose(trace.R_id[i][:, 2], trace.u[i] / trace.f[i], atol=1e-15)
    assert np.array_equal(trace.Omega_id, np.zeros((N_QUADS, 3)))
    # tether rates depend on the state alone; attitude rates are differenced over memory
    _, trace2, mem2 = compute_controls(s, gains, mem, reference.params, 1e-3)
    assert mem2.ticks == 2 and mem2.t == pytest.approx(1e-3)
    assert np.array_equal(trace2.omega_id, trace.omega_id)
    assert np.array_equal(trace2.omegadot_id, trace.omegadot_id)
    assert np.allclose(trace2.Omega_id, 0.0, atol=1e-9)
    assert list(mem2.streak) == [1, 1, 1]


def test_control_tick_rejects_bad_dt(hover, gains, params):
    with pytest.raises(ValueError):
        compute_controls(hover, gains, ControllerMemory(), params, 0.0)


def test_degenerate_tension_holds_last_direction(hover):
    held = np.tile(np.array([0.6, 0.0, 0.8]), (N_QUADS, 1))
    mem = ControllerMemory(t=0.0, q_id=held)
    assert np.array_equal(_tether_direction(0, np.zeros(3), hover, mem), held[0])
    assert np.array_equal(_tether_direction(0, np.zeros(3), hover, ControllerMemory()), hover.q[0])


def test_gimbal_fallback_heading(hover):
    R, b1, held = _attitude_setpoint(0, np.array([4.0, 0.0, 0.0]), hover, ControllerMemory())
    assert np.array_equal(b1, B1_FALLBACK) and not held
    assert is_rotation(R)
    assert np.allclose(R[:, 2], E1)


# --- designed flow / references ---

def _moving(hover):
    return hover.replace(
        v_p=np.array([0.1, 0.0, -0.2]), R_p=rotation_about(E1, 0.3),
        Omega_p=np.array([0.2, -0.1, 0.3]), r_b=np.array([0.3, -0.2]), rdot_b=np.array([0.1, 0.2]),
    )


def test_designed_accelerations_match_allocated_tensions(rng, gains, params):
    for _ in range(50):
        s = random_state(rng)
        rdd, odd, Wd = designed_accelerations(s, gains, params)
        full = np.concatenate(decoupled_dynamics(s, desired_tensions(s, gains, params), params))
        tol = 1e-8 * max(1.0, float(np.max(np.abs(full))))
        assert np.allclose(np.concatenate([rdd, odd, Wd]), full, rtol=0.0, atol=tol)


def test_tether_rates_follow_the_reduced_flow(hover, gains, params):
    s = _moving(hover)
    zero33 = np.zeros((N_QUADS, 3))

    def field(x):
        rdd, odd, Wd = decoupled_dynamics(x, desired_tensions(x, gains, params), params)
        return Accelerations(rdd, odd, Wd, zero33, zero33)

    h = 1e-4
    s1 = rk4_lie_step(s, field, h)
    s2 = rk4_lie_step(s1, field, h, t=h)
    q = [np.stack([desired_tether_direction(mu) for mu in desired_tensions(x, gains, params).mu])
         for x in (s, s1, s2)]
    qdot = (-3.0 * q[0] + 4.0 * q[1] - q[2]) / (2.0 * h)
    qddot = (q[0] - 2.0 * q[1] + q[2]) / (h * h)

    mu = desired_tensions(s, gains, params)
    q_id, omega_id, omegadot_id = tether_references(s, gains, params, mu, ControllerMemory())
    assert np.allclose(q_id, q[0], atol=1e-14)
    for i in range(N_QUADS):
        assert abs(omega_id[i] @ q_id[i]) < 1e-9
        assert np.allclose(np.cross(omega_id[i], q_id[i]), qdot[i],
                           atol=1e-3 * max(1.0, np.linalg.norm(omega_id[i])))
        assert np.allclose(omegadot_id[i], np.cross(q_id[i], qddot[i]),
                           atol=2e-2 * max(1.0, np.linalg.norm(omegadot_id[i])))


def test_tether_references_ignore_controller_memory(hover, gains, params):
    s = _moving(hover)
    mu = desired_tensions(s, gains, params)
    _, w0, wd0 = tether_references(s, gains, params, mu, ControllerMemory())
    stale = ControllerMemory(t=4.0, q_id=-hover.q, ticks=9)
    _, w1, wd1 = tether_references(s, gains, params, mu, stale)
    assert np.array_equal(w0, w1) and np.array_equal(wd0, wd1)


def test_tether_references_static_at_target(hover, gains, params):
    mu = desired_tensions(hover, gains, params)
    q_id, omega_id, omegadot_id = tether_references(hover, gains, params, mu, ControllerMemory())
    assert np.allclose(q_id, hover.q, atol=1e-12)
    assert np.allclose(omega_id, 0.0, atol=1e-9)
    assert np.allclose(omegadot_id, 0.0, atol=1e-6)


def test_attitude_differences_restart_on_heading_switch(hover, gains, params):
    _, _, mem = compute_controls(hover, gains, ControllerMemory(), params, 1e-3)
    _, _, mem = compute_controls(hover, gains, mem, params, 1e-3)
    assert list(mem.streak) == [1, 1, 1]
    b1 = mem.b1.copy()
    b1[0] = B1_FALLBACK
    turned = np.stack([R @ rotation_about(E3, 0.01) for R in mem.R_id])
    _, trace, mem = compute_controls(hover, gains, replace(mem, b1=b1, R_id=turned), params, 1e-3)
    assert list(mem.streak) == [0, 2, 2]
    assert np.array_equal(trace.Omega_id[0], ZERO)
    assert np.linalg.norm(trace.Omega_id[1]) > 1.0


def test_parallel_thrust_carries_only_the_tether_component(gains, reference):
    s, p = reference.state0, reference.params
    _, trace, _ = compute_controls(s, gains, ControllerMemory(), p, 1e-3)
    carried = np.stack([s.q[i] * (s.q[i] @ trace.mu[i]) for i in range(N_QUADS)])
    assert max(np.linalg.norm(trace.mu - carried, axis=1)) > 1e-3
    expected = parallel_controls(s, TensionSet(mu=carried), trace.U1, trace.U2, p)
    assert np.array_equal(trace.u_par, expected)
