"""
Verification of the Plant Model
===============================
Tests:
1. Kinetic and potential energy against hand evaluations.
2. Mass-matrix blocks and bias terms.
3. Full coupled dynamics: free fall, static hover, residuals.
4. Cross-model oracle: full dynamics = tensions → decoupled dynamics.
5. Tensions and body positions.
"""
from dataclasses import replace

import numpy as np
import pytest

from dynamics.energy import kinetic_energy, potential_energy, linear_momentum, body_velocities
from dynamics.plant import (
    mass_blocks, mass_matrix, bias_terms, full_dynamics, decoupled_dynamics, eom_residuals,
    tensions, body_positions, quadrotor_angular_acceleration
)
from geom.so3 import E3, hat, rotation_about
from models.errors import NonParallelInput, RankDeficientAttachment
from models.state import ControlInput, TensionSet, E, N_QUADS
from verify.sampling import random_state, random_inputs


def hover_inputs(p):
    share = (p.m_p + p.m_b) * p.g / N_QUADS
    return ControlInput(u=np.stack([(p.m[i] * p.g + share) * E3 for i in range(N_QUADS)]),
                        M=np.zeros((N_QUADS, 3)))


# --- energies ---

def test_kinetic_energy_at_rest(hover, params):
    assert kinetic_energy(hover, params) == 0.0


def test_kinetic_energy_plate_spin(hover, params):
    s = hover.replace(Omega_p=np.array([0.0, 0.0, 1.0]))
    expected = 0.5 * params.J_p[2, 2] + sum(
        0.5 * params.m[i] * np.linalg.norm(hat(s.Omega_p) @ params.x[i]) ** 2 for i in range(N_QUADS)
    )
    assert kinetic_energy(s, params) == pytest.approx(expected, rel=1e-12)


def test_kinetic_energy_common_translation(hover, params):
    s = hover.replace(v_p=np.array([1.0, 0.0, 0.0]))
    assert kinetic_energy(s, params) == pytest.approx(0.5 * params.total_mass, rel=1e-12)


def test_potential_energy_at_hover(hover, params):
    expected = float(np.sum(params.m * params.g * params.l))
    assert potential_energy(hover, params) == pytest.approx(expected, rel=1e-12)


def test_potential_energy_uniform_lift(rng, params):
    s = random_state(rng)
    h = 2.5
    lifted = s.replace(o_p=s.o_p + h * E3)
    gain = potential_energy(lifted, params) - potential_energy(s, params)
    assert gain == pytest.approx(params.total_mass * params.g * h, rel=1e-10)


def test_potential_energy_flipped_tethers(hover, params):
    flipped = hover.replace(q=-hover.q)
    drop = potential_energy(hover, params) - potential_energy(flipped, params)
    assert drop == pytest.approx(2.0 * float(np.sum(params.m * params.g * params.l)), rel=1e-12)


# --- metric and bias ---

def test_mass_blocks_at_centered_ball(hover, params):
    M11, M12, _ = mass_blocks(hover, params)
    assert np.array_equal(M11, params.m_b * np.eye(2))
    assert np.allclose(M12, np.hstack([params.m_b * E.T, np.zeros((2, 3))]), atol=1e-15)


def test_mass_matrix_symmetric_positive_definite(rng, params):
    for _ in range(200):
        M = mass_matrix(random_state(rng), params)
        assert np.allclose(M, M.T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(0.5 * (M + M.T))) > 0.0


def test_bias_terms_level_plate(hover, params):
    s = hover.replace(r_b=np.array([0.3, -0.2]))
    N1, _ = bias_terms(s, params)
    assert np.allclose(N1, 0.0, atol=1e-15)
    _, N2 = bias_terms(hover, params)
    expected = np.concatenate([(params.m_p + params.m_b) * params.g * E3, np.zeros(3)])
    assert np.allclose(N2, expected, atol=1e-12)


def test_bias_terms_rolled_plate(hover, params):
    s = hover.replace(R_p=rotation_about([1.0, 0.0, 0.0], np.pi / 2))
    N1, _ = bias_terms(s, params)
    assert np.allclose(N1, params.m_b * params.g * np.array([0.0, 1.0]), atol=1e-12)


# --- full dynamics ---

def test_free_fall(hover, params):
    acc = full_dynamics(hover, ControlInput.zeros(), params)
    assert np.allclose(acc.oddot_p, -params.g * E3, atol=1e-9)
    assert np.allclose(acc.rddot_b, 0.0, atol=1e-9)
    assert np.allclose(acc.Omegadot_p, 0.0, atol=1e-9)
    assert np.allclose(acc.omegadot, 0.0, atol=1e-9)
    assert np.allclose(acc.Omegadot, 0.0, atol=1e-9)


def test_static_hover_is_equilibrium(hover, params):
    acc = full_dynamics(hover, hover_inputs(params), params)
    for a in (acc.rddot_b, acc.oddot_p, acc.Omegadot_p, acc.omegadot, acc.Omegadot):
        assert np.allclose(a, 0.0, atol=1e-9)


def test_principal_axis_quadrotor_spin(params):
    Wd = quadrotor_angular_acceleration(np.array([1.0, 0.0, 0.0]), np.zeros(3), params.J[0])
    assert np.allclose(Wd, 0.0, atol=1e-15)


def test_tether_acceleration_respects_constraint(rng, params):
    for _ in range(50):
        s = random_state(rng)
        acc = full_dynamics(s, random_inputs(rng), params)
        for i in range(N_QUADS):
            qdot = np.cross(s.omega[i], s.q[i])
            assert acc.omegadot[i] @ s.q[i] == pytest.approx(-s.omega[i] @ qdot, abs=1e-9)


def test_eom_residuals_vanish(rng, params):
    for _ in range(100):
        s, u = random_state(rng), random_inputs(rng)
        acc = full_dynamics(s, u, params)
        scale = max(1.0, float(np.max(np.abs(np.concatenate([acc.rddot_b, acc.oddot_p, acc.Omegadot_p])))))
        for name, res in eom_residuals(s, u, acc, params).items():
            assert np.max(np.abs(res)) < 1e-8 * scale, name


def test_full_dynamics_at_extreme_rates(hover, params):
    # bias terms near 1e15 must not leak into the acceleration matrix
    fast = hover.replace(r_b=np.array([0.1, 0.0]), Omega_p=np.array([0.0, 0.0, 1e8]))
    acc = full_dynamics(fast, hover_inputs(params), params)
    full = np.concatenate([acc.rddot_b, acc.oddot_p, acc.Omegadot_p])
    assert np.all(np.isfinite(full))
    scale = max(1.0, float(np.max(np.abs(full))))
    for name in ("ball", "translation", "orientation"):
        assert np.max(np.abs(eom_residuals(fast, hover_inputs(params), acc, params)[name])) < 1e-8 * scale, name


def test_full_dynamics_ignore_plate_position(rng, params):
    s, u = random_state(rng), random_inputs(rng)
    a = full_dynamics(s, u, params)
    b = full_dynamics(s.replace(o_p=s.o_p + np.array([3.0, -4.0, 7.0])), u, params)
    assert np.allclose(a.oddot_p, b.oddot_p, atol=1e-12)
    assert np.allclose(a.rddot_b, b.rddot_b, atol=1e-12)


def test_cross_model_oracle(rng, params):
    for _ in range(200):
        s, u = random_state(rng), random_inputs(rng)
        acc = full_dynamics(s, u, params)
        u_par = np.stack([s.q[i] * (s.q[i] @ u.u[i]) for i in range(N_QUADS)])
        mu = tensions(s, u_par, (acc.oddot_p, acc.Omegadot_p), params)
        rdd, odd, Wd = decoupled_dynamics(s, mu, params)
        full = np.concatenate([acc.rddot_b, acc.oddot_p, acc.Omegadot_p])
        tol = 1e-8 * max(1.0, float(np.max(np.abs(full))))
        assert np.allclose(np.concatenate([rdd, odd, Wd]), full, rtol=0.0, atol=tol)


# --- decoupled dynamics / tensions ---

def test_decoupled_static_balance(hover, params):
    share = (params.m_p + params.m_b) * params.g / N_QUADS
    rdd, odd, Wd = decoupled_dynamics(hover, TensionSet(mu=np.tile(share * E3, (N_QUADS, 1))), params)
    assert np.allclose(np.concatenate([rdd, odd, Wd]), 0.0, atol=1e-12)


def test_decoupled_free_fall(hover, params):
    rdd, odd, Wd = decoupled_dynamics(hover, TensionSet(mu=np.zeros((N_QUADS, 3))), params)
    assert np.allclose(odd, -params.g * E3, atol=1e-12)
    assert np.allclose(rdd, 0.0, atol=1e-12)
    assert np.allclose(Wd, 0.0, atol=1e-12)


def test_tensions_at_hover(hover, params):
    share = (params.m_p + params.m_b) * params.g / N_QUADS
    u_par = hover_inputs(params).u
    mu = tensions(hover, u_par, (np.zeros(3), np.zeros(3)), params)
    assert np.allclose(mu.mu, np.tile(share * E3, (N_QUADS, 1)), atol=1e-12)


def test_tensions_self_supporting_quadrotors(hover, params):
    u_par = np.stack([params.m[i] * params.g * E3 for i in range(N_QUADS)])
    mu = tensions(hover, u_par, (np.zeros(3), np.zeros(3)), params)
    assert np.allclose(mu.mu, 0.0, atol=1e-12)


def test_tensions_lie_along_tethers(rng, params):
    for _ in range(100):
        s = random_state(rng)
        u_par = rng.standard_normal(N_QUADS)[:, None] * 10.0 * s.q
        mu = tensions(s, u_par, (rng.standard_normal(3), rng.standard_normal(3)), params)
        for i in range(N_QUADS):
            assert np.allclose(mu.mu[i] - s.q[i] * (s.q[i] @ mu.mu[i]), 0.0, atol=1e-10)


def test_tensions_reject_off_tether_thrust(hover, params):
    u_par = np.tile(E3, (N_QUADS, 1))
    u_par[1] = [1.0, 0.0, 0.0]
    with pytest.raises(NonParallelInput) as info:
        tensions(hover, u_par, (np.zeros(3), np.zeros(3)), params)
    assert info.value.index == 1


# --- positions / momentum ---

def test_body_positions(hover, params):
    o_b, o_i = body_positions(hover.replace(r_b=np.array([1.0, 1.0])), params)
    assert np.allclose(o_b, [1.0, 1.0, 0.0])
    for i in range(N_QUADS):
        assert np.allclose(o_i[i] - params.x[i], [0.0, 0.0, params.l[i]])


def test_cable_length_is_preserved(rng, params):
    for _ in range(50):
        s = random_state(rng)
        _, o_i = body_positions(s, params)
        for i in range(N_QUADS):
            anchor = s.o_p + s.R_p @ params.x[i]
            assert np.linalg.norm(o_i[i] - anchor) == pytest.approx(params.l[i], rel=1e-12)


def test_linear_momentum_of_common_translation(hover, params):
    v = np.array([0.2, -0.4, 1.0])
    p_lin = linear_momentum(hover.replace(v_p=v), params)
    assert np.allclose(p_lin, params.total_mass * v, atol=1e-12)
    v_b, v_i = body_velocities(hover.replace(v_p=v), params)
    assert np.allclose(v_b, v) and np.allclose(v_i, np.tile(v, (N_QUADS, 1)))


def test_collinear_attachments_rejected(params):
    bad = replace(params, x=np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]))
    with pytest.raises(RankDeficientAttachment):
        bad.validated()
