"""Exception types shared across the package.

Parameter-validation failures raise plain ValueError at the offending call
site; the classes here mark domain failures a caller may want to handle
specifically (bad input files, artifact mismatches, size refusals).
"""


class NieblockError(Exception):
    """Base class for package-specific failures."""


class ParseError(NieblockError):
    """An input file line could not be parsed.

    Carries the 1-based line number so CLI messages can point at the line.
    """

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class FingerprintMismatchError(NieblockError):
    """A model, dataset, or stats cache was built for a different graph."""


class ModelFormatError(NieblockError):
    """A model or cache file has an unknown version or is malformed."""


class TrainingDivergedError(NieblockError):
    """Training hit a non-finite loss."""

    def __init__(self, epoch: int):
        super().__init__(f"non-finite loss at epoch {epoch}; lower the learning rate")
        self.epoch = epoch


class OracleSizeError(NieblockError):
    """Exact enumeration was refused because the graph is too large."""
