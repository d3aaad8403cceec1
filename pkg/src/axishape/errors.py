"""Exception types raised by the library."""


class DomainError(ValueError):
    """Input lies outside the domain of an operation."""


class SingularError(ArithmeticError):
    """Evaluation hit a coordinate singularity (cos(psi) = 0 or rho = 0)."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class StepSizeError(RuntimeError):
    """Adaptive integration could not continue; ``last_state`` is the last accepted point."""

    def __init__(self, message, last_state=None, rho=None):
        super().__init__(message)
        self.last_state = last_state
        self.rho = rho
