"""Exception hierarchy shared by every layer of the package."""


class QRSError(ValueError):
    """Base class for all errors raised by qrsgame."""


class ContractError(QRSError):
    """An operator or argument violates a documented precondition."""


class InvalidStateError(QRSError):
    """A Bloch vector or density matrix lies outside the state space."""


class UnsupportedDimensionError(QRSError):
    pass


class DirectionError(QRSError):
    """A direction set is malformed (norm, duplicates, antipodes, parse)."""


class PreparationError(QRSError):
    """A preparation report is malformed or incomplete."""


class DegeneratePreparationError(QRSError):
    """The r-factor denominator n^2 - <B,B> vanishes."""


class SearchTooLargeError(QRSError):
    """Exhaustive enumeration refused because the problem exceeds the cap."""


class NoValidRoundsError(QRSError):
    """A simulation produced no round in which Alice answered."""
