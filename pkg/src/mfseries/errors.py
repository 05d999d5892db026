"""Exception hierarchy shared by all engine modules."""


class MFSError(Exception):
    """Base class for every error raised by the engine."""


class ContextMismatch(MFSError):
    """Operands live over different base algebras."""


class OrderMismatch(MFSError):
    """Operands are truncated at different orders."""


class NotInvertible(MFSError):
    """An algebra element (or constant term) is numerically singular."""


class LinearTermSingular(NotInvertible):
    """The linear component of a series is not an invertible map B -> B."""


class NonzeroConstantTerm(MFSError):
    """A series that must vanish at degree 0 does not."""


class NotLeftMultipleOfI(MFSError):
    """A series does not factor as I times another series."""


class DegreeOutOfRange(MFSError):
    """Requested degree exceeds the truncation order."""


class ConsistencyFailure(MFSError):
    """An identity that must hold for valid inputs was violated."""


class SizeLimitExceeded(MFSError):
    """Brute-force enumeration requested beyond its size guard."""
