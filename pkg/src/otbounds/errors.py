"""Exception hierarchy shared by all modules.

Every error carries a CLI exit code so the front end can map failures
without a lookup table.
"""


class OTBoundsError(Exception):
    exit_code = 3


class ParseError(OTBoundsError, ValueError):
    exit_code = 2


class DomainError(OTBoundsError, ValueError):
    exit_code = 3


class AlphabetOverflow(OTBoundsError):
    """Raised when a table would exceed the configured atom budget."""

    exit_code = 4


class ZeroConditioning(DomainError):
    pass


class WeightOutOfRange(DomainError):
    pass


class NotPrime(DomainError):
    pass


class NotAFunction(DomainError):
    pass


class ConditionViolated(DomainError):
    pass


class NoWitness(DomainError):
    pass


class SmoothingOutOfRange(DomainError):
    pass


class MalformedOpening(DomainError):
    pass


class InvalidState(DomainError):
    pass


class LengthMismatch(DomainError):
    pass
