"""Exception hierarchy shared by all vallab modules."""


class VallabError(Exception):
    """Base class for library errors."""


class ValidationError(VallabError):
    """An input violates a documented invariant."""

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}" if detail else invariant)


class ParseError(ValidationError):
    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        VallabError.__init__(self, f"{path}: {reason}")
        self.invariant = "parse"


class Unsupported(VallabError):
    """The requested dimension or family is outside the supported scope."""


class DimensionMismatch(ValidationError):
    def __init__(self, detail=""):
        super().__init__("DimensionMismatch", detail)


class EmptyBodyError(ValidationError):
    def __init__(self, detail="operation undefined on the empty body"):
        super().__init__("EmptyBody", detail)


class InvalidRotation(ValidationError):
    def __init__(self, detail=""):
        super().__init__("InvalidRotation", detail)


class NegativeRadius(ValidationError):
    def __init__(self, detail=""):
        super().__init__("NegativeRadius", detail)


class DegenerateSimplex(ValidationError):
    def __init__(self, detail=""):
        super().__init__("DegenerateSimplex", detail)


class MissingFacets(ValidationError):
    def __init__(self, detail=""):
        super().__init__("MissingFacets", detail)


class NotFullDimensional(ValidationError):
    def __init__(self, detail=""):
        super().__init__("NotFullDimensional", detail)


class WindowTooSmall(ValidationError):
    def __init__(self, detail=""):
        super().__init__("WindowTooSmall", detail)


class PrecisionTooLow(VallabError):
    """Integer-relation search cannot be trusted at the requested precision."""


class ParallelTangents(ValidationError):
    def __init__(self, detail=""):
        super().__init__("ParallelTangents", detail)


class NonConvexSupport(ValidationError):
    def __init__(self, detail=""):
        super().__init__("NonConvexSupport", detail)


class OriginNotInterior(ValidationError):
    def __init__(self, detail=""):
        super().__init__("OriginNotInterior", detail)


class OriginOutside(ValidationError):
    def __init__(self, detail=""):
        super().__init__("OriginOutside", detail)


class NegativeScale(ValidationError):
    def __init__(self, detail=""):
        super().__init__("NegativeScale", detail)


class NonConvexInput(ValidationError):
    def __init__(self, detail=""):
        super().__init__("NonConvexInput", detail)


class NonConvexMin(ValidationError):
    def __init__(self, detail=""):
        super().__init__("NonConvexMin", detail)


class NotCoercive(ValidationError):
    def __init__(self, direction, detail=""):
        self.direction = direction
        super().__init__("NotCoercive", detail or f"no positive growth along {list(direction)}")


class NotSuperCoercive(ValidationError):
    def __init__(self, detail=""):
        super().__init__("NotSuperCoercive", detail)


class InsufficientNodes(ValidationError):
    def __init__(self, detail=""):
        super().__init__("InsufficientNodes", detail)
