"""Exception hierarchy shared by all modules."""


class DiffAssocError(Exception):
    """Base class for all package errors."""


class InputError(DiffAssocError):
    """Invalid parameters or malformed input (CLI exit code 2)."""


class DimensionError(DiffAssocError):
    """Shapes that must agree do not (CLI exit code 3)."""


class DegenerateError(DiffAssocError):
    """Data too degenerate for the statistic to be defined (CLI exit code 4)."""


class DegenerateData(DegenerateError):
    pass


class NonPositiveVariance(DegenerateError):
    pass


class BlockMismatch(DimensionError):
    pass


class SizeMismatch(DimensionError):
    pass


class DimensionMismatch(DimensionError):
    pass


class GroupTooSmall(InputError):
    pass


class TooLarge(InputError):
    pass


class InvalidRho(InputError):
    pass


class InvalidCaseParameter(InputError):
    pass


class FactorizationFailure(DegenerateError):
    pass
