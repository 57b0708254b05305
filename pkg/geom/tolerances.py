"""
Numerical tolerances, kept in one place.
"""

from pydantic import BaseModel, ConfigDict, Field


class Tolerances(BaseModel):
    """Thresholds shared by geometry, dynamics, control and verification."""
    model_config = ConfigDict(frozen=True)

    identity: float = Field(1e-9, description="Algebraic identities (skew, orthogonality, unit norm)")
    small_angle: float = Field(1e-8, description="Below this rotation angle exp_so3 uses its series")
    max_condition: float = Field(1e12, description="Largest acceptable condition number of a solve")
    parallel: float = Field(1e-9, description="Tether-parallel check on u∥")
    mu_min: float = Field(1e-6, description="Smallest tension [N] that defines a tether direction")
    f_min: float = Field(1e-6, description="Smallest thrust [N] that defines a body axis")
    gimbal_deg: float = Field(1.0, description="Smallest angle [deg] between b1 and the thrust axis")
    divergence: float = Field(1e9, description="State norm that counts as divergence")
    projection: float = Field(1e-12, description="Unit-norm drift left after projection")
    renormalize: float = Field(1e-3, description="Largest unit-norm defect repaired on scenario load")


_tolerances = Tolerances()


def get_tolerances() -> Tolerances:
    return _tolerances
