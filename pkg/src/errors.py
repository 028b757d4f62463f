"""Exceptions raised by the inference toolkit.

Every condition the library signals is a subclass of :class:`InferenceError`, itself a
``ValueError``, so callers can catch the whole family at once (the CLI does).
"""


class InferenceError(ValueError):
    pass


# Discrete hypotheses.
class InvalidSystemError(InferenceError):
    pass


class UnknownEventError(InferenceError):
    pass


class InconsistentEvidenceError(InferenceError):
    pass


class UndefinedFactorError(InferenceError):
    pass


class IndeterminateOddsError(InferenceError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


# Case counting.
class InvalidPartitionError(InferenceError):
    pass


class ImpossibleEventError(InferenceError):
    pass


# Error model and observations.
class InvalidErrorScaleError(InferenceError):
    pass


class InvertedIntervalError(InferenceError):
    pass


class InvalidObservationError(InferenceError):
    pass


class InvalidPredictionError(InferenceError):
    def __init__(self, message: str, index: int | None = None, flat_index: int | None = None):
        super().__init__(message)
        self.index = index
        self.flat_index = flat_index


# Model expressions.
class ExpressionSyntaxError(InferenceError):
    def __init__(self, message: str, position: int, expected: frozenset = frozenset()):
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(detail)
        self.position = position
        self.expected = expected


class UnknownFunctionError(InferenceError):
    def __init__(self, name: str, position: int):
        super().__init__(f"Unknown function '{name}' at position {position}")
        self.name = name
        self.position = position


class UnboundNameError(InferenceError):
    pass


class DuplicateBindingError(InferenceError):
    pass


class ExpressionDomainError(InferenceError):
    def __init__(self, message: str, subexpression: str, flat_index: int | None = None):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression
        self.flat_index = flat_index


# Parameter grids.
class InvalidParameterSpaceError(InferenceError):
    pass


class UnknownAxisError(InferenceError):
    pass


class DegeneratePosteriorError(InferenceError):
    pass


# Command line.
class InvalidRunOptionError(InferenceError):
    pass
