"""Exception hierarchy shared by all modules."""


class DirIndexError(Exception):
    """Base class for toolkit errors."""


# geometry
class ZeroDirection(DirIndexError, ValueError):
    pass


class OutsideBall(DirIndexError, ValueError):
    pass


class ZeroComponent(DirIndexError, ValueError):
    pass


class DegenerateDirection(DirIndexError, ValueError):
    pass


# funcs
class UnknownFunction(DirIndexError, KeyError):
    pass


class BadParams(DirIndexError, ValueError):
    pass


# lfield
class NonPositiveL(DirIndexError, ValueError):
    pass


class EtaOutOfRange(DirIndexError, ValueError):
    pass


class ZeroTheta(DirIndexError, ValueError):
    pass


class PreconditionViolated(DirIndexError, ValueError):
    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


# dirderiv
class CircleEscapesDomain(DirIndexError, ValueError):
    pass


class OrderTooHigh(DirIndexError, ValueError):
    pass


# index
class DegenerateParams(DirIndexError, ValueError):
    pass


# criteria
class BadRadii(DirIndexError, ValueError):
    pass


class BadLambdas(DirIndexError, ValueError):
    pass


class AllCirclesDegenerate(DirIndexError, ValueError):
    pass


# zeros
class ZeroOnCircle(DirIndexError, ArithmeticError):
    pass


class NonIntegerResidue(DirIndexError, ArithmeticError):
    pass


class BudgetExceeded(DirIndexError, RuntimeError):
    pass


class EmptyComplement(DirIndexError, ValueError):
    pass


# growth
class NonFiniteWeight(DirIndexError, ArithmeticError):
    pass


class NotNormalized(DirIndexError, ValueError):
    pass


# cli
class ConfigError(DirIndexError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class MissingSeries(DirIndexError, KeyError):
    pass
