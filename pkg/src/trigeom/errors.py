"""Exception types shared across the engine."""


class TrigeomError(Exception):
    """Base class for all engine errors."""


class SortViolation(TrigeomError):
    """An edge joins vertices of a forbidden sort combination."""


class DuplicateId(TrigeomError):
    pass


class UnknownId(TrigeomError):
    pass


class BadParameter(TrigeomError):
    """Invalid configuration value, e.g. polygon parameter n < 6."""


class MixedSorts(TrigeomError):
    """A rank-2 predimension was requested for a set spanning both points and planes."""


class NotAnE2Edge(TrigeomError):
    pass


class BudgetExceeded(TrigeomError):
    """An exhaustive search would exceed its configured cap.

    Deterministic failure; never silent truncation.
    """


class OracleMismatch(TrigeomError):
    """Iterative closure disagreed with the brute-force defining intersection."""


class NotStrong(TrigeomError):
    pass


class NotSimple(TrigeomError):
    pass


class InvalidOverride(TrigeomError):
    """A mu override violates the lower bound 2*delta(base)."""


class BaseMismatch(TrigeomError):
    """The shared base induces different structures in the two amalgamation sides."""


class NotAFlag(TrigeomError):
    pass


class PreconditionFailed(TrigeomError):
    pass


class InternalCopyMissing(TrigeomError):
    """A zero-step amalgam failed and no strong internal copy exists.

    Signals a soundness bug or invalid inputs; always a hard error.
    """
