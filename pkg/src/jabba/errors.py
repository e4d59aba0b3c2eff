class JabbaError(ValueError):
    """Base class for all data and validation errors raised by this package."""


class InvalidInput(JabbaError):
    pass


class InvalidPiece(JabbaError):
    pass


class InvalidPartition(JabbaError):
    pass


class InvalidK(JabbaError):
    pass


class InvalidR(JabbaError):
    pass


class UnknownSymbol(JabbaError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class LayoutError(JabbaError):
    pass


class ParseError(JabbaError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column


class ModelVersionError(JabbaError):
    pass


class InvariantViolation(JabbaError):
    """A benchmark run broke one of the guarantees it is supposed to keep."""
