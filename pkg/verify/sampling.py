"""
Seeded random draws of valid states and inputs for the property checks.
"""

from typing import Optional

import numpy as np
from scipy.spatial.transform import Rotation

from geom.so3 import exp_so3
from models.state import SystemState, ControlInput, N_QUADS


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform on SO(3): a normalized Gaussian quaternion."""
    quat = rng.standard_normal(4)
    return Rotation.from_quat(quat / np.linalg.norm(quat)).as_matrix()


def random_tangent(q: np.ndarray, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    w = scale * rng.standard_normal(3)
    return w - (w @ q) * q


def random_state(rng: np.random.Generator, scale: float = 1.0, upright: bool = False) -> SystemState:
    """
    Any point of the configuration manifold with velocities of size ~scale.

    upright keeps every tether in the upper hemisphere, as in flight.
    """
    q = np.stack([random_unit(rng) for _ in range(N_QUADS)])
    if upright:
        q[:, 2] = np.abs(q[:, 2]) + 0.5
        q /= np.linalg.norm(q, axis=1, keepdims=True)
    return SystemState(
        o_p=rng.standard_normal(3),
        v_p=scale * rng.standard_normal(3),
        R_p=random_rotation(rng),
        Omega_p=scale * rng.standard_normal(3),
        r_b=rng.uniform(-1.0, 1.0, 2),
        rdot_b=scale * rng.standard_normal(2),
        q=q,
        omega=np.stack([random_tangent(q[i], rng, scale) for i in range(N_QUADS)]),
        R=np.stack([random_rotation(rng) for _ in range(N_QUADS)]),
        Omega=scale * rng.standard_normal((N_QUADS, 3)),
    )


def random_inputs(rng: np.random.Generator, thrust: float = 10.0, moment: float = 0.1) -> ControlInput:
    return ControlInput(u=thrust * rng.standard_normal((N_QUADS, 3)),
                        M=moment * rng.standard_normal((N_QUADS, 3)))


def perturbed_target(rng: np.random.Generator, magnitude: float = 0.5,
                     base: Optional[SystemState] = None) -> SystemState:
    """Ball–plate coordinates displaced from the target by at most `magnitude` each."""
    base = SystemState.hover() if base is None else base

    def ball(n):
        v = rng.standard_normal(n)
        return magnitude * rng.uniform() * v / np.linalg.norm(v)

    axis = ball(3)
    return base.replace(
        o_p=np.array([0.0, 0.0, magnitude * rng.uniform(-1.0, 1.0)]),
        v_p=np.array([0.0, 0.0, magnitude * rng.uniform(-1.0, 1.0)]),
        R_p=exp_so3(axis),
        Omega_p=ball(3),
        r_b=ball(2),
        rdot_b=ball(2),
    )
