"""Exception hierarchy.

Every error carries a short ``category`` string; the CLI prints it on failure
and maps it to a distinct exit code.
"""


class StructSumError(Exception):
    category = "error"


class FormatError(StructSumError):
    """Input file violates its documented format."""

    category = "format"

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class EmptyCorpusError(StructSumError):
    category = "empty-corpus"


class SummaryParseError(StructSumError):
    """Strict parse hit a malformed segment."""

    category = "parse"

    def __init__(self, segment: str):
        super().__init__(f"malformed summary segment: {segment!r}")
        self.segment = segment


class CapabilityError(StructSumError):
    """Requested backend cannot perform the operation (or its runtime is missing)."""

    category = "capability"


class ConfigError(StructSumError):
    category = "config"
