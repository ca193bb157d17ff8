"""Exception hierarchy shared by all modules."""


class CircRepError(ValueError):
    """Base class for every error raised by this package."""


# geometry
class CoincidentCircles(CircRepError):
    pass


class DegeneratePoints(CircRepError):
    pass


class NonpositiveRadius(CircRepError):
    pass


class PoleOnCircle(CircRepError):
    pass


# chains
class SideMismatch(CircRepError):
    pass


class NoOuterSolution(CircRepError):
    pass


class NonpositiveInput(CircRepError):
    pass


class NotAChain(CircRepError):
    pass


class PreconditionError(CircRepError):
    """Input does not satisfy the tangency/ordering gate of an operation."""


class NotInduced(PreconditionError):
    pass


class NotSymmetric(PreconditionError):
    pass


class NotOrdered(PreconditionError):
    pass


class OrderViolation(CircRepError):
    pass


# solver
class UnknownKind(CircRepError):
    pass


class DimensionMismatch(CircRepError):
    pass


# graphs
class NoSuchEdge(CircRepError):
    pass


class DegreeMismatch(CircRepError):
    pass


class InvalidInstance(CircRepError):
    pass


class InvalidGraph(CircRepError):
    pass


# representation
class TriplePoint(CircRepError):
    pass


class FreeCircle(CircRepError):
    pass


class UnknownId(CircRepError):
    pass


class IoFailure(CircRepError):
    pass
