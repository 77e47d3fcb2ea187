"""Exception hierarchy shared by all pipeline stages."""


class CubepotError(Exception):
    """Base class for errors raised by this package."""


class DivisionByZero(CubepotError, ZeroDivisionError):
    pass


class InvalidRadicand(CubepotError, ValueError):
    pass


class InvalidInterval(CubepotError, ValueError):
    pass


class NotRewritable(CubepotError, ValueError):
    pass


class NotTranslatable(CubepotError, ValueError):
    pass


class NotFinite(CubepotError, ArithmeticError):
    pass


class QuadratureFailure(CubepotError, RuntimeError):
    pass


class InvalidSpec(CubepotError, ValueError):
    pass


class Divergent(CubepotError, ArithmeticError):
    pass
