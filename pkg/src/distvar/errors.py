"""Exception hierarchy shared by all distvar modules."""


class DistvarError(Exception):
    """Base class for every error raised by distvar."""


class NonSquare(DistvarError, ValueError):
    pass


class ConvergenceFailure(DistvarError, ArithmeticError):
    pass


class NotHermitian(DistvarError, ValueError):
    pass


class NegativeEigenvalue(DistvarError, ValueError):
    pass


class DimensionMismatch(DistvarError, ValueError):
    pass


class NotCommuting(DistvarError, ValueError):
    pass


class NotCommutingAtZ(NotCommuting):
    """Pencil matrices at a base point fail to commute; the Sigma data is invalid."""


class GenericCombinationFailure(DistvarError, ArithmeticError):
    """Every random linear combination tried left some matrix non-triangular."""


class MalformedSigma(DistvarError, ValueError):
    pass


class InvalidSigma(DistvarError, ValueError):
    pass


class IndexOutOfRange(DistvarError, IndexError):
    pass


class SingularPencilEverywhere(DistvarError, ArithmeticError):
    pass


class NotAContraction(DistvarError, ValueError):
    pass


class NotPure(DistvarError, ValueError):
    pass


class EmptyCloud(DistvarError, ValueError):
    pass


class UnsupportedKind(DistvarError, ValueError):
    pass


class ParseError(DistvarError, ValueError):
    pass


class ShapeError(DistvarError, ValueError):
    pass
