"""Exception types raised by eigenorient."""


class EigenOrientError(ValueError):
    """Base class for all library errors."""


class NonOrthonormalInput(EigenOrientError):
    """The eigenvector matrix is not orthonormal within tolerance."""

    def __init__(self, residual, tol):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(
            f"eigenvector matrix is not orthonormal: max|V^T V - I| = "
            f"{self.residual:.3e} exceeds tolerance {self.tol:.1e}"
        )


class DimensionMismatch(EigenOrientError):
    pass


class PivotNegative(EigenOrientError):
    """A working column reached the angle solver with a negative pivot."""


class AxisOutOfRange(EigenOrientError, IndexError):
    pass


class UndefinedMeanDirection(EigenOrientError):
    """The resultant vector has (numerically) zero length."""


class NonOrthogonalMean(EigenOrientError):
    pass


class DegenerateEnsemble(EigenOrientError):
    pass


class InvalidDimension(EigenOrientError):
    pass


class SingularDesign(EigenOrientError):
    pass


class ParseError(EigenOrientError):
    pass
