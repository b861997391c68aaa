"""
Exception types raised by the bound and model functions.

Everything a caller can fix by changing an argument is a DomainError
(a ValueError, so plain `except ValueError` still works). Failures that
come from the arithmetic itself are NumericError.
"""


class DomainError(ValueError):
    """
    A parameter lies outside its documented domain.
    """


class DegenerateSpectrumError(DomainError):
    """
    Normal-form CM with y = (a+b)^2 - 4c^2 too close to zero to decompose.
    """


class UnsupportedFormError(DomainError):
    """
    CM is not of the aI / bI / cZ normal form with c >= 0.
    """


class NumericError(ArithmeticError):
    """
    Singular matrix or non-finite intermediate while evaluating a bound.
    """
