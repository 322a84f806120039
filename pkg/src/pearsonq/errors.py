"""Exception hierarchy shared by every pearsonq module."""


class PearsonQError(Exception):
    """Base class for all package errors."""

    code = "error"


class DataError(PearsonQError, ValueError):
    """Input data cannot be used (unreadable file, bad cell, empty sample)."""

    code = "data_error"


class ThetaDegenerate(DataError):
    """The sample has too few distinct values for the moment estimators.

    Attributes
    ----------
    distinct : int or None
        Number of distinct values observed, None when unknown.
    theta : float
        The value of m4*m2 - m3**2 - m2**3 that triggered the error.
    """

    code = "theta_degenerate"

    def __init__(self, distinct, theta, message=None):
        self.distinct = distinct
        self.theta = theta
        if message is None:
            message = (
                f"estimators undefined: {'?' if distinct is None else distinct} distinct value(s), "
                f"theta={theta:.6g}"
            )
        super().__init__(message)


class NonpositiveVariance(DataError):
    code = "nonpositive_variance"


class InvalidSpec(PearsonQError, ValueError):
    code = "invalid_spec"


class UnsupportedAlpha(PearsonQError, ValueError):
    code = "unsupported_alpha"


class NumericError(PearsonQError, ArithmeticError):
    code = "numeric_error"


class SingularSystem(NumericError):
    code = "singular_system"


class SingularCovariance(NumericError):
    code = "singular_covariance"
