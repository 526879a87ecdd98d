"""Exception hierarchy shared by all qpl modules."""


class QPLError(Exception):
    """Base class for every error raised by qpl."""


class DomainError(QPLError, ValueError):
    """Bad numeric input; the CLI maps these to exit status 2."""


class QOutOfRange(DomainError):
    pass


class NonFinite(DomainError):
    pass


class NoDecayCertificate(DomainError):
    pass


class CapExceeded(DomainError):
    pass


class EmptyCoeffs(DomainError):
    pass


class IndexOverCap(DomainError):
    pass


class ParamMismatch(DomainError):
    pass


class NegativeShift(DomainError):
    pass


class NotInDomain(DomainError):
    """The difference quotient of a function fails to converge at 0."""


class DimOutOfRange(DomainError):
    pass


class DimTooSmall(DomainError):
    pass


class ZeroAtTop(DomainError):
    """A section coefficient vanishes at the spectrum point 1."""


class DivergentSection(DomainError):
    """The section recursion for this power of B_- grows without bound."""


class ParseError(QPLError, ValueError):
    """Malformed function specification; CLI exit status 3."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DegreeTooHigh(ParseError):
    pass


class DefectTooDeep(ParseError):
    pass
