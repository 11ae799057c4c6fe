"""Exception types raised by the solver stack."""


class ModErfError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ModErfError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidInterval(ModErfError, ValueError):
    """Integration bounds are reversed or non-finite."""


class NonConvergence(ModErfError, ArithmeticError):
    """A refinement or iteration budget ran out before the tolerance was met.

    Attributes:
        report: Partial result (e.g. an ``IterationReport``) when one exists.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class KViolation(ModErfError, ValueError):
    """A function handed to the operator is not a member of K."""

    def __init__(self, message, membership=None):
        super().__init__(message)
        self.membership = membership


class DeltaOutOfRange(ModErfError, ValueError):
    """delta is negative or outside the range where the iteration contracts."""


class DegenerateInput(ModErfError, ValueError):
    """Two inputs are too close for a ratio to be meaningful."""


class BlowUp(ModErfError, ArithmeticError):
    """A shooting trajectory left the admissible band.

    Attributes:
        x: Abscissa where the trajectory left the band.
        y: Offending value.
    """

    def __init__(self, message, x=float("nan"), y=float("nan")):
        super().__init__(message)
        self.x = x
        self.y = y


class StiffnessFailure(ModErfError, ArithmeticError):
    """The adaptive step size underflowed."""


class BracketFailure(ModErfError, ValueError):
    """No sign change of the shooting residual over the slope interval."""
