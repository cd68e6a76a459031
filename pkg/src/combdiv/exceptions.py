"""Exception hierarchy shared by every module."""


class CombError(ValueError):
    """Base class for all errors raised by combdiv."""


class DuplicateLabel(CombError):
    pass


class UnknownLabel(CombError):
    pass


class BadPermutation(CombError):
    pass


class NotHermitian(CombError):
    pass


class NotDensityOperator(CombError):
    pass


class DimensionMismatch(CombError):
    pass


class ShapeMismatch(CombError):
    pass


class NotTracePreserving(CombError):
    pass


class NotADistribution(CombError):
    pass


class BadStepIndex(CombError):
    pass


class NotACombChoi(CombError):
    pass


class DualityViolation(CombError):
    """The dual-action identity failed; this points at a superprocess bug."""


class UnknownScenario(CombError):
    pass
