"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NotPeriodicError(ArithmeticError):
    """A map has no period k <= 4 on the sampled points."""


class NotOrderNError(ArithmeticError):
    """An orbit failed to close after the stated number of steps."""


class NotFreeError(ArithmeticError):
    """Two entries of an orbit coincide, so the action is not free there."""


class DegeneratePathError(ValueError):
    """Endpoint lifts are antipodal and spherical interpolation is undefined."""


class InconsistentCoverError(ArithmeticError):
    """The covering group's orbits are not contained in the base group's orbits."""


class DescentError(ArithmeticError):
    """A map on S^3 does not descend along the tested deck transformation."""


class TheoremCheckError(ArithmeticError):
    """A fibre of the f_A family failed a well-formedness or equivariance check."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
