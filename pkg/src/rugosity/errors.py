"""Exception hierarchy shared by all modules.

Validation problems derive from ``ValueError`` and map to CLI exit code 2;
numerical failures derive from ``NumericalError`` and map to exit code 3.
"""


class RugosityError(Exception):
    """Base class for every error raised by the toolkit."""


class ValidationError(RugosityError, ValueError):
    """Input violates a documented precondition."""


class NumericalError(RugosityError, ArithmeticError):
    """A numerical procedure failed to reach its target accuracy."""


class NegativeProfile(ValidationError):
    def __init__(self, min_value, argmin):
        self.min_value = float(min_value)
        self.argmin = float(argmin)
        super().__init__(
            f"profile is negative: min {self.min_value:.6g} at t = {self.argmin:.6g}"
        )


class InvalidDomain(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class InvalidResolution(ValidationError):
    pass


class MeshDegenerate(NumericalError):
    pass


class SingularElement(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    def __init__(self, coarse, fine, tol):
        self.coarse = coarse
        self.fine = fine
        self.tol = tol
        super().__init__(
            f"quadrature refinement changed the result by more than {tol:g} (relative)"
        )


class DegenerateEigensolve(NumericalError):
    pass


class NotConverged(NumericalError):
    def __init__(self, iterations, residual):
        self.iterations = int(iterations)
        self.residual = float(residual)
        super().__init__(
            f"CG stopped after {self.iterations} iterations, relative residual {self.residual:.3e}"
        )


class IndefiniteSystem(NumericalError):
    pass


class NearSingularSystem(NumericalError):
    pass


class InsufficientData(ValidationError):
    pass


class DegenerateSweep(NumericalError):
    """All sweep errors sit at solver-noise level; no rate can be fitted."""
