"""Exception types shared across the package."""


class ScatterError(Exception):
    """Base class for all errors raised by the engine."""


class DimensionError(ScatterError, ValueError):
    """Operands live in lattices of different ranks or shapes."""


class DomainError(ScatterError, ValueError):
    """An argument lies outside the domain of an operation."""


class NotInvertibleError(DomainError):
    """A series with non-unit constant term was raised to a negative power."""


class InvalidWallError(DomainError):
    """Wall data violates the wall invariants."""


class NonTransversalPathError(ScatterError):
    """A path touches a joint or runs tangent to a wall."""


class GenericityError(ScatterError):
    """A chosen point is not generic with respect to a diagram."""


class AssumptionError(ScatterError):
    """A seed fails an assumption required by the requested construction."""


class PreconditionError(ScatterError):
    """The input of an algorithm violates its precondition."""


class CompletionError(ScatterError):
    """Completion reached a configuration it cannot handle."""


class PsiConditionError(DomainError):
    """A diagram over M+N fails the principal-coefficient conditions."""

    def __init__(self, message, wall=None):
        super().__init__(message)
        self.wall = wall
