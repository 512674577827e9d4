"""Exception types raised by the library.

All of them derive from :class:`OneHotNBError` (itself a ``ValueError``) so the
CLI can map any validation failure onto a single exit code.
"""


class OneHotNBError(ValueError):
    """Base class for input and domain errors."""


class NegativeEntry(OneHotNBError):
    pass


class BadSum(OneHotNBError):
    pass


class TooShort(OneHotNBError):
    pass


class BadAlpha(OneHotNBError):
    pass


class IndexOutOfRange(OneHotNBError, IndexError):
    pass


class LengthMismatch(OneHotNBError):
    pass


class ZeroEvidence(OneHotNBError):
    """Every class assigns zero probability to the observation."""


class EmptyData(OneHotNBError):
    pass


class LabelOutOfRange(OneHotNBError):
    pass


class OutOfUnitInterval(OneHotNBError):
    pass


class BadK(OneHotNBError):
    pass


class ZeroTheta(OneHotNBError):
    pass


class UndefinedRho(OneHotNBError):
    pass


class BadStep(OneHotNBError):
    pass


class NotOneHot(OneHotNBError):
    pass


class BadConfig(OneHotNBError):
    pass
