"""Exception hierarchy.

Every error raised on purpose by the library derives from ``PowerSpecError`` so
callers (and the CLI) can catch the family in one place. Each class also
derives from the closest builtin, so ``except ValueError`` keeps working.
"""


class PowerSpecError(Exception):
    """Base class for all library errors."""


class ValidationError(PowerSpecError, ValueError):
    """Input fails a documented precondition."""


class SolverFailure(PowerSpecError, RuntimeError):
    """An eigensolver did not converge."""


class TheoremViolation(PowerSpecError, AssertionError):
    """A measured quantity exceeded a proven bound."""


class IndexOutOfRange(ValidationError, IndexError):
    pass


class IsolatedVertex(ValidationError):
    def __init__(self, vertex):
        super().__init__(f"vertex {vertex} has zero degree")
        self.vertex = vertex


class InvalidGraph(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class SingleEigenvalue(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class MassMismatch(ValidationError):
    pass


class NegativeMass(ValidationError):
    pass


class NotProbability(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class ZeroFunction(ValidationError):
    pass


class MissingPair(ValidationError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class SameVertex(ValidationError):
    pass


class DegenerateWeight(ValidationError):
    pass


class BadRadii(ValidationError):
    pass


class InvalidPermutation(ValidationError):
    pass


class ZeroVariance(ValidationError):
    pass
