"""Exception hierarchy shared by every hymem module."""


class HymemError(Exception):
    """Base class for library errors."""


class DomainValidationError(HymemError, ValueError):
    """A list of flow segments does not describe a hybrid time domain with memory."""


class ContiguityError(DomainValidationError):
    pass


class AnchorError(DomainValidationError):
    pass


class OrderError(DomainValidationError):
    pass


class OutOfDomain(HymemError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "point outside the hybrid domain"


class DimensionMismatch(HymemError, ValueError):
    pass


class BadInitial(HymemError, ValueError):
    pass


class EmptyFlowSet(HymemError, RuntimeError):
    pass


class NoBracket(HymemError, ValueError):
    pass


class NonFiniteValue(HymemError, ArithmeticError):
    pass


class DomainError(HymemError, ValueError):
    """Scalar arguments outside the range where a formula is defined."""


class SchemaError(HymemError, ValueError):
    pass


class ParamError(HymemError, ValueError):
    pass
