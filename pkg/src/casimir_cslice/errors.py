"""Exception types raised by the numerical core."""


class NumericalError(RuntimeError):
    """Base class for anticipated numerical failures."""


class SingularMatrixError(NumericalError):
    """A dynamical matrix or reflection denominator is (numerically) singular."""


class PropagationOverflowError(NumericalError):
    """A propagation exponent exceeds the representable range."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge within its node budget.

    Attributes
    ----------
    estimate : float or None
        Best estimate available when the budget ran out (None if nothing was
        evaluated).
    error : float or None
        Error estimate belonging to ``estimate``.
    nodes : int
        Integrand evaluations spent.
    """

    def __init__(self, message, estimate=None, error=None, nodes=0):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.nodes = nodes
