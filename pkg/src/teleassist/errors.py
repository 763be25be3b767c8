"""Exception and warning taxonomy shared across the package."""


class AssistanceError(Exception):
    """Base class for all teleassist errors."""


class DegenerateInputError(AssistanceError):
    """Input data carries no usable information (e.g. zero-duration trajectory)."""


class SchemaError(AssistanceError):
    """Structured data violates the expected layout (channels, dimensions, files)."""


class ParseError(SchemaError):
    """A persisted document could not be decoded.

    Carries ``location`` (file path, field path or line) for diagnostics.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class SingularSystemError(AssistanceError):
    """A linear system is rank-deficient and no regularization was requested."""


class NoContextError(AssistanceError):
    """Recognition was asked to pick among zero candidate primitives."""


class InsufficientObservationError(AssistanceError):
    """The observed motion prefix is too short to score candidates.

    ``fraction_observed`` reports the span observed so far as a fraction of
    the required observation window.
    """

    def __init__(self, message, fraction_observed):
        self.fraction_observed = fraction_observed
        super().__init__(f"{message} (observed fraction {fraction_observed:.3f})")


class UnknownObjectError(AssistanceError):
    """Referenced object class or object id is not registered in the scene."""


class IllegalTransitionError(AssistanceError):
    """A session command arrived in a state that does not permit it."""

    def __init__(self, state, command):
        self.state = state
        self.command = command
        super().__init__(f"command {command!r} is illegal in state {state!r}")


class ActiveExecutionError(AssistanceError):
    """A mutation was rejected because a session is executing or validating."""


class ConstraintError(AssistanceError):
    """Requested constraints are infeasible (e.g. blend target out of range)."""


class PoseValidationError(AssistanceError):
    """A transform is not a valid rigid transform or a quaternion is far from unit."""


class ConditioningJitterWarning(UserWarning):
    """The innovation matrix was singular and a small jitter was added."""


class PhaseClampWarning(UserWarning):
    """A phase value fell outside [0, 1] and was clamped."""


class CovarianceFloorWarning(UserWarning):
    """Eigenvalue flooring removed a non-negligible amount of covariance mass."""
