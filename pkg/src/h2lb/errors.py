"""Exception hierarchy shared by all h2lb modules."""


class H2LBError(Exception):
    """Base class for computational failures raised by h2lb."""


class DomainError(H2LBError, ValueError):
    """An input lies outside the region where an operation is defined.

    Typical causes: a pole on or outside the unit circle, a zero of a
    Blaschke product with modulus >= 1, a weight polynomial vanishing on
    the circle.
    """


class ConvergenceError(H2LBError):
    """An iterative procedure stopped before reaching its tolerance.

    The best iterate found is attached as ``partial`` when available.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NotCoprimeError(H2LBError, ValueError):
    """Two polynomials share a root within tolerance."""
