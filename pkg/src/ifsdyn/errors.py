"""Exception hierarchy shared by every module."""


class IfsError(ValueError):
    """Base class for all library errors."""

    code = "IfsError"


class NotContractive(IfsError):
    code = "NotContractive"


class EscapesSpace(IfsError):
    code = "EscapesSpace"

    def __init__(self, message, vertex=None, image=None):
        super().__init__(message)
        self.vertex = vertex
        self.image = image


class PointOutsideSpace(IfsError):
    code = "PointOutsideSpace"


class SpaceMismatch(IfsError):
    code = "SpaceMismatch"


class NotNormalizable(IfsError):
    code = "NotNormalizable"


class AlphabetMismatch(IfsError):
    code = "AlphabetMismatch"


class EmptySystem(IfsError):
    code = "EmptySystem"


class TimeOutsideDomain(IfsError):
    code = "TimeOutsideDomain"


class OriginNotInSpace(IfsError):
    code = "OriginNotInSpace"


class InvalidRatio(IfsError):
    code = "InvalidRatio"


class ResolutionMismatch(IfsError):
    code = "ResolutionMismatch"


class EmptyRaster(IfsError):
    code = "EmptyRaster"


class PrerequisiteFailed(IfsError):
    code = "PrerequisiteFailed"


class ParseError(IfsError):
    code = "ParseError"

    def __init__(self, message, position=None):
        where = f" at {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.position = position


class ValidationError(IfsError):
    code = "ValidationError"

    def __init__(self, message, entity=None, reason=None):
        super().__init__(message)
        self.entity = entity
        self.reason = reason
