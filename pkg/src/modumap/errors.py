"""Exception hierarchy shared by every compilation stage."""


class ModumapError(Exception):
    """Base class for all errors raised by this package."""


class QasmParseError(ModumapError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CircuitError(ModumapError, ValueError):
    """A circuit or instruction violates its structural invariants."""


class ParameterError(ModumapError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ArchitectureError(ModumapError, ValueError):
    pass


class TopologyError(ModumapError, ValueError):
    pass


# Validation surfaces. Each enumerated failure has its own class so callers
# (and tests) can tell them apart without parsing messages.

class ValidationError(ModumapError, ValueError):
    pass


class IndexRangeError(ValidationError):
    pass


class NonFiniteWeightError(ValidationError):
    pass


class NegativeWeightError(ValidationError):
    pass


class CapacityExceededError(ValidationError):
    """Total logical demand exceeds total QPU capacity."""


class CapacityViolationError(ValidationError):
    """A concrete partition overloads at least one QPU."""


class PartitionLengthError(ValidationError):
    pass


class TrafficMatrixError(ValidationError):
    pass


class AsymmetricTrafficError(TrafficMatrixError):
    pass


class NegativeTrafficError(TrafficMatrixError):
    pass


class NonFiniteTrafficError(TrafficMatrixError):
    pass


class TrafficDiagonalError(TrafficMatrixError):
    pass


class TrafficShapeError(TrafficMatrixError):
    pass


class LinkLoadError(ValidationError):
    pass


class InvalidDistanceTableError(ValidationError):
    pass


class InfeasibleLayoutError(ValidationError):
    """Base for layout rejections."""


class LayoutNotInjectiveError(InfeasibleLayoutError):
    pass


class LayoutRangeError(InfeasibleLayoutError):
    pass


class LayoutQpuMismatchError(InfeasibleLayoutError):
    pass


class IncompleteLayoutError(InfeasibleLayoutError):
    pass


class LayoutOverflowError(InfeasibleLayoutError):
    pass


class InfeasibleRoutingError(ModumapError):
    """Traffic exists between QPUs that are not connected."""

    def __init__(self, pairs):
        self.pairs = sorted(pairs)
        super().__init__(f"traffic between disconnected QPU pairs: {self.pairs}")


class RoutingError(ModumapError):
    pass


class RoutingVerificationError(RoutingError):
    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"instruction {index}: {message}"
        super().__init__(message)


class ExtractionError(ModumapError, ValueError):
    pass


class SchedulingError(ModumapError):
    pass


class ConfigError(ModumapError, ValueError):
    """Configuration failed to load; ``path`` names the offending key."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PipelineError(ModumapError):
    """A pipeline stage failed; ``stage`` records which one."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
