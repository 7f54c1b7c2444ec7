"""
Protocol Errors

Every failure raised by the package derives from QCPError so callers
(the CLI in particular) can map them to exit codes.
"""


class QCPError(Exception):
    """Base class for all change-point simulator errors."""
    pass


class DomainError(QCPError, ValueError):
    """Argument outside the range an operation is defined on."""
    pass


class InvalidLengthError(DomainError):
    """Sequence or window length below 1."""
    pass


class ProtocolLogicError(QCPError, RuntimeError):
    """Outcome contradicting the protocol's own bookkeeping.

    Never expected at runtime; it means a window or hypothesis update is wrong.
    """
    pass


class CapacityError(QCPError):
    """Exact enumeration requested beyond its size guard."""
    pass


class ConfigError(QCPError, ValueError):
    """Invalid trial configuration or command-line value."""
    pass
