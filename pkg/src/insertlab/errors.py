"""Exception types shared across the package."""


class InsertLabError(Exception):
    """Base class for package errors."""


class ConfigurationError(InsertLabError):
    """Invalid configuration, shapes, or missing artifacts."""


class UsageError(InsertLabError):
    """API misuse: wrong call order or malformed arguments."""


class SceneGenerationError(InsertLabError):
    """Rejection sampling could not place the scene objects."""


class TrainingError(InsertLabError):
    """Training diverged or failed to produce a usable model."""


class IdentificationError(InsertLabError):
    """No present slot available for target identification."""


class ReidentificationError(InsertLabError):
    """Re-identification called on an empty decomposition."""


class InfeasibleGoalError(InsertLabError):
    """Planning goal lies inside the inflated occupancy."""


class ExecutionFault(InsertLabError):
    """Unexpected contact while traversing a planned path."""
