"""Exception hierarchy for arnlab."""


class ArnError(Exception):
    """Base class for all arnlab errors."""


class DslError(ArnError):
    """Problem with a neuron program."""


class ParseError(DslError):
    """Syntax error in neuron program text."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownIdentifierError(ParseError):
    """Reference to a name that is not in scope."""


class TypeCheckError(DslError):
    """Ill-typed neuron program."""


class SymbolCostError(DslError):
    """Symbol missing from a complexity table."""


class CompileError(ArnError):
    """Program cannot be lowered to a kernel."""


class DataError(ArnError):
    """Malformed or unusable dataset."""


class NumericError(ArnError):
    """Every training step or every candidate diverged."""


class ArtifactFormatError(ArnError):
    """Artifact file without a supported format-version header."""
