"""Exception hierarchy shared by all modules."""


class DKTwistError(Exception):
    """Base class for errors raised by this package."""


class NotSymmetric(DKTwistError):
    pass


class UnsupportedAtZero(DKTwistError):
    """Requested an object that diverges in the crystal limit q -> 0."""


class SpectrumMismatch(DKTwistError):
    pass


class ZeroDenominatorOrder(DKTwistError):
    """q -> 0 limit of a q-number ratio is 0 or divergent and was not permitted."""


class DegenerateSector(DKTwistError):
    """A joint eigenspace of the refining operators is more than one-dimensional."""

    def __init__(self, weight, keys, dim, message=None):
        self.weight = weight
        self.keys = keys
        self.dim = dim
        if message is None:
            w = "(" + ", ".join(str(x) for x in weight) + ")"
            message = (f"degenerate sector at weight {w}: joint eigenvalue keys "
                       f"{tuple(round(k, 6) for k in keys)} span {dim} dimensions")
        super().__init__(message)


class UnsupportedSector(DegenerateSector):
    """No non-degenerate route exists for this (spec, q) combination."""

    def __init__(self, message):
        super().__init__((), (), 0, message)


class SignAmbiguity(DKTwistError):
    pass


class LabelMismatch(DKTwistError):
    pass


class ChainMismatch(DKTwistError):
    pass


class InternalConsistency(DKTwistError):
    pass


class LimitNotConverged(DKTwistError):
    pass
