"""
verify/__init__.py

The named suites live in verify.suites (they drive simulations, so they
are not imported here).
"""
from verify.lyapunov import (
    LyapunovSample, lyapunov_V, lyapunov_V2, lyapunov_z, lyapunov_sample,
    attitude_bounds_from_initial, monotonicity_monitor, MonotonicityReport, exponential_fit
)
from verify.gains import (
    GainCertificate, Verdict, build_w_prime, gain_condition_check,
    characteristic_eigenvalues, sampled_negative_definite, eigen_negative_definite
)
from verify.sampling import random_state, random_inputs, random_rotation, perturbed_target
from verify.boundary_layer import (
    DecayFit, BoundaryLayerReport, fit_decay, boundary_layer_monitor, predicted_attitude_error_rate
)
from verify.oracles import (
    euler_lagrange_residual, energy_audit, EnergyAudit, input_power,
    internal_dynamics_report, InternalDynamicsReport,
    height_condition_monitor, HeightConditionReport
)
