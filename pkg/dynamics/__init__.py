"""
dynamics/__init__.py
"""
from dynamics.energy import (
    kinetic_energy, potential_energy, total_energy, lagrangian,
    body_velocities, linear_momentum
)
from dynamics.plant import (
    mass_blocks, mass_matrix, bias_terms, decoupled_dynamics, decoupled_from_wrench,
    full_dynamics, eom_residuals, tensions, body_positions,
    quadrotor_angular_acceleration
)
