"""Exception hierarchy shared by every module."""


class TropFGLMError(Exception):
    pass


class PrecisionExhausted(TropFGLMError):
    """Working precision is too small to decide a comparison or a rank."""


class UnknownValuation(PrecisionExhausted):
    """Valuation of an inexact zero is only bounded from below."""


class DivisionByZero(TropFGLMError, ZeroDivisionError):
    pass


class ZeroPolynomial(TropFGLMError):
    pass


class NotZeroDimensional(TropFGLMError):
    pass


class NotReduced(TropFGLMError):
    pass


class NotSemiStable(TropFGLMError):
    pass


class NotShapePosition(TropFGLMError):
    pass


class BoundTooSmall(TropFGLMError):
    pass


class InternalDegreeOverflow(TropFGLMError):
    pass


class SamplingFailed(TropFGLMError):
    pass


class NotUnimodular(UserWarning):
    """Change of variables leaves GL_n of the valuation ring."""
