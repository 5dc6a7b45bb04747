"""Exception hierarchy for the twrc package.

Every error raised by this package derives from :class:`TwrcError`, so callers
can catch one base class.  Input-validation problems additionally derive from
:class:`ValueError` so that idiomatic ``except ValueError`` blocks keep
working.
"""


class TwrcError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TwrcError, ValueError):
    """Invalid user input: bad gains, bad geometry, bad allocation, bad args."""


class CoincidentNodesError(ValidationError):
    """Two network nodes were placed at the same coordinates.

    Path-loss gains diverge at zero distance, so the geometry is rejected.
    """


class InfeasibleAllocationError(ValidationError):
    """A power allocation violates a power budget or a structural constraint."""


class SideConditionError(TwrcError):
    """The ordering assumption behind the regime thresholds does not hold.

    The relay-gain thresholds used to pick a technique pair are only valid
    when the self-interference-side threshold is no larger than the combined
    direct-plus-relay one.  When that ordering fails, the lookup table does
    not apply.
    """


class WrongRegimeError(TwrcError):
    """A closed-form routine was invoked for link gains outside its regime."""


class NoRootError(TwrcError):
    """A scalar equation that a closed form relies on has no root in range."""


class GridCapError(TwrcError):
    """A brute-force grid would exceed the configured point-count cap."""
