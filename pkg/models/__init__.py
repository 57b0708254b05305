"""
models/__init__.py

Only the dependency-free models are re-exported here; the numeric value
types live in models.state and the file schema in models.scenario.
"""
from models.errors import (
    PlateSwarmError, NonSkewInput, SingularMassMatrix, NonParallelInput,
    RankDeficientAttachment, DegenerateTension, DegenerateThrust,
    GimbalDegeneracy, ControlError, StepDiverged, InsufficientSamples,
    ScenarioError, TrajectoryFileError
)
from models.gains import Gains
