"""Exception types shared across the package."""


class MargingapError(Exception):
    """Base class for package-specific failures."""


class FormatError(MargingapError, ValueError):
    """Malformed input file or serialized object."""


class BudgetExceededError(MargingapError):
    """A configured enumeration or solver budget was exhausted."""


class VerificationError(MargingapError):
    """A certificate or cross-check that must hold failed."""
