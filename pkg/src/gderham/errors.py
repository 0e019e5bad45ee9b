"""Exception types shared across the package."""


class GderhamError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(GderhamError):
    """Matrix or vector dimensions are incompatible."""


class ComplexConditionViolated(GderhamError):
    """Consecutive differentials do not compose to zero."""


class VariableCountMismatch(GderhamError):
    """Operators over different numbers of variables were combined."""


class IncompatibleSpecs(GderhamError):
    """Two presentations do not share the same grading setup."""


class UncoveredRegion(GderhamError):
    """A computation touched a grading label outside the covered window."""


class InhomogeneousOperator(GderhamError):
    """A homogeneous operator was required but a mixed-degree one given."""


class CoarseModeUnsupported(GderhamError):
    """The construction needs the fine (multidegree) grading."""


class NotAMapOfPresentations(GderhamError):
    """Per-label blocks do not define a map between the presentations."""


class PreconditionFailed(GderhamError):
    """A check was invoked on input that violates its precondition."""


class IncompleteWindow(GderhamError):
    """A verdict was requested but the window does not certify totals."""


class RecipeError(GderhamError):
    """A module recipe string could not be parsed or instantiated."""
