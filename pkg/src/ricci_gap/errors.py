"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: input errors -> 2, capability
guards -> 3, internal invariant failures -> 4.
"""


class RicciGapError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(RicciGapError, ValueError):
    """A caller-supplied argument violates a documented precondition."""

    exit_code = 2


class PreconditionError(InputError):
    pass


class MetricInfiniteError(InputError):
    """Two distributions are supported on different connected components."""


class CapabilityError(RicciGapError):
    """A size guard was exceeded (dense solve, ball census, exact walk)."""

    exit_code = 3


class GenerationError(CapabilityError):
    """The configuration model exhausted its retry budget."""


class InvariantError(RicciGapError, AssertionError):
    """An internal consistency check failed; this indicates a bug."""

    exit_code = 4
