"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so limit overruns, bad input
and falsified lattice properties stay distinguishable from ordinary check
failures.
"""


class EpsncError(Exception):
    """Base class for package-specific errors."""


class InputError(EpsncError):
    """Malformed or inconsistent input data (files, CLI arguments)."""


class SizeLimitError(EpsncError):
    """An enumeration was requested beyond the configured maximum size."""


class StateLimitError(EpsncError):
    """A search exceeded its state-count budget."""


class LatticeViolationError(EpsncError):
    """A structural lattice property failed.

    Raised when a meet of two eps-noncrossing partitions is not
    eps-noncrossing, or a pair has no unique minimal upper bound.  Either
    event would falsify the lattice structure this package is built on,
    so it aborts loudly instead of being reported as a plain failure.
    """
