class GrailError(Exception):
    """Base class for every error raised by the package."""


class ParseError(GrailError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


class SortError(GrailError):
    pass


class GradeError(GrailError):
    pass


class MixedSemiringError(GradeError):
    pass


class UnsupportedJoin(GradeError):
    pass


class UnsupportedFragment(GrailError):
    pass


class ModelError(GrailError):
    pass
