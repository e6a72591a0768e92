"""Exception types raised by the steering engine."""


class InvalidStateError(ValueError):
    """A state object failed Hermiticity, trace, positivity or shape checks."""


class TruncationError(ValueError):
    """A coherent amplitude is too large for the requested Fock cutoff."""


class ZeroProbabilityOutcome(ArithmeticError):
    """The outcome has vanishing probability so the steered qubit state is undefined."""
