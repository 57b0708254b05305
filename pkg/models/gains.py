"""
Controller gains.
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Gains(BaseModel):
    """All controller constants plus the Lyapunov cross-term constants."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    k1: float = Field(8.0, gt=0, description="Plate angular-rate damping")
    k2: float = Field(16.0, gt=0, description="Plate attitude stiffness")
    k3: float = Field(4.0, gt=0, description="Ball velocity gain")
    k4: float = Field(4.0, gt=0, description="Ball position gain")
    k5: float = Field(4.0, gt=0, description="Plate vertical damping")
    k6: float = Field(4.0, gt=0, description="Plate height stiffness")
    k7: float = Field(16.0, gt=0, description="Tether alignment stiffness")
    k8: float = Field(8.0, gt=0, description="Tether rate damping")
    kR: float = Field(0.0049 * 40, gt=0, description="Quadrotor attitude gain")
    kOmega: float = Field(0.0049 * 12, gt=0, description="Quadrotor rate gain")
    eps: float = Field(0.05, gt=0, le=1, description="Time-scale parameter ε")
    c0: float = Field(0.5, gt=0, lt=1, description="V₂ cross-term constant")
    c1: float = Field(0.5, gt=0, description="V ball cross-term constant")
    c2: float = Field(0.5, gt=0, description="V attitude cross-term constant")

    @model_validator(mode="after")
    def _c0_below_k1(self):
        if self.c0 >= self.k1:
            raise ValueError(f"c0 = {self.c0} must be below k1 = {self.k1}")
        return self

    def with_(self, **changes) -> "Gains":
        """Copy with overrides, re-validated."""
        return Gains(**{**self.model_dump(), **changes})
