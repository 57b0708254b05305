"""
Plate Swarm Errors
==================
One exception hierarchy for the whole package.

The cli layer maps these onto exit codes:
- ScenarioError and parameter failures  → 1
- StepDiverged                          → 2
- verification failures                 → 3
"""

from typing import Optional


class PlateSwarmError(Exception):
    """Root of every error raised by this package."""


# ═══════════════════════════════════════════════════════
#  GEOMETRY
# ═══════════════════════════════════════════════════════

class NonSkewInput(PlateSwarmError):
    """vee() was handed a matrix that is not skew-symmetric."""

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        super().__init__(f"matrix is not skew-symmetric (|M + Mᵀ| = {residual:.3e} > {tol:.1e})")


# ═══════════════════════════════════════════════════════
#  DYNAMICS
# ═══════════════════════════════════════════════════════

class SingularMassMatrix(PlateSwarmError):
    """The 8×8 ball–plate system is too ill-conditioned to solve."""

    def __init__(self, cond: float):
        self.cond = cond
        super().__init__(f"ball–plate mass system is singular (cond = {cond:.3e})")


class NonParallelInput(PlateSwarmError):
    """A thrust handed to tensions() is not parallel to its tether."""

    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(f"u∥ of tether {index + 1} is off its tether by {residual:.3e}")


class RankDeficientAttachment(PlateSwarmError):
    """The attachment points cannot produce an arbitrary plate wrench."""

    def __init__(self, detail: str):
        super().__init__(f"attachment matrix [I I I; x̂₁ x̂₂ x̂₃] is rank deficient: {detail}")


# ═══════════════════════════════════════════════════════
#  CONTROL
# ═══════════════════════════════════════════════════════

class DegenerateTension(PlateSwarmError):
    """Tension too small to define a tether direction."""

    def __init__(self, norm: float, threshold: float):
        self.norm = norm
        super().__init__(f"tension norm {norm:.3e} ≤ {threshold:.1e}")


class DegenerateThrust(PlateSwarmError):
    """Thrust too small to define a body axis."""

    def __init__(self, norm: float, threshold: float):
        self.norm = norm
        super().__init__(f"thrust norm {norm:.3e} ≤ {threshold:.1e}")


class GimbalDegeneracy(PlateSwarmError):
    """Heading direction b₁ is (nearly) parallel to the thrust axis."""

    def __init__(self, angle_deg: float):
        self.angle_deg = angle_deg
        super().__init__(f"b1 is {angle_deg:.3f}° from the thrust axis")


class ControlError(PlateSwarmError):
    """A per-tether/per-quadrotor control step failed."""

    def __init__(self, index: int, stage: str, cause: Exception):
        self.index = index
        self.stage = stage
        self.cause = cause
        super().__init__(f"quadrotor {index + 1} ({stage}): {cause}")


# ═══════════════════════════════════════════════════════
#  SIMULATION / VERIFICATION / FILES
# ═══════════════════════════════════════════════════════

class StepDiverged(PlateSwarmError):
    """State blew up during integration."""

    def __init__(self, t: float, norm: float):
        self.t = t
        self.norm = norm
        super().__init__(f"integration diverged at t = {t:.6f} s (state norm {norm:.3e})")


class InsufficientSamples(PlateSwarmError):
    """A trajectory check needs more samples than it was given."""

    def __init__(self, needed: int, got: int, what: str = "check"):
        self.needed = needed
        self.got = got
        super().__init__(f"{what} needs at least {needed} samples, got {got}")


class ScenarioError(PlateSwarmError):
    """A scenario file failed to parse or validate."""

    def __init__(self, message: str, location: str = "", line: Optional[int] = None):
        self.message = message
        self.location = location
        self.line = line
        where = f"line {line}: " if line is not None else ""
        at = f"{location}: " if location else ""
        super().__init__(f"{where}{at}{message}")


class TrajectoryFileError(PlateSwarmError):
    """A trajectory CSV is empty, truncated or has the wrong header."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
