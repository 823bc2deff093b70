"""Exception hierarchy shared by all knorm modules."""


class KnormError(Exception):
    """Base class for all knorm failures."""


class InadmissibleParameters(KnormError):
    """Parameters outside the admissible domain (N, p, a, b, c)."""


class ShootingError(KnormError):
    """No sign-definite decaying solution found within the shooting bracket."""


class NonConvergence(KnormError):
    """An iterative procedure failed to reach its tolerance."""


class NoNegativeMinimum(KnormError):
    """The scalar reduction has no interior negative minimum (mass below threshold)."""


class NoMountainPassGeometry(KnormError):
    """Mountain pass condition violated (p < 8/N, or p = 8/N with mass too small)."""


class GridTooCoarse(KnormError):
    """A radial grid cannot resolve the requested operation."""


class InvalidField(KnormError):
    """A radial field violates its basic invariants (zero mass, bad grid, ...)."""
