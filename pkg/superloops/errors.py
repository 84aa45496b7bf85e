from typing import Optional


class SuperloopsError(Exception):
    """Base class for every error raised by superloops."""


class ContextError(SuperloopsError):
    pass


class ParityError(SuperloopsError):
    pass


class NotInvertibleError(SuperloopsError):
    pass


class NotClosedError(SuperloopsError):
    pass


class FormDegreeError(SuperloopsError):
    pass


class WindowError(SuperloopsError):
    """A truncated loop or series does not carry enough coefficients."""


class StructureError(SuperloopsError):
    """Invalid local superalgebra or derivation data."""


class BasisSizeError(SuperloopsError):
    pass


class PoleError(SuperloopsError):
    pass


class ScriptError(SuperloopsError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"{self.line}:{self.column}: {self.message}"


class LexError(ScriptError):
    pass


class ScriptSyntaxError(ScriptError):
    pass


class BindingError(ScriptError):
    pass


class ScriptParityError(ScriptError):
    pass
