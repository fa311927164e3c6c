class AnswerRankError(Exception):
    """Base class for errors raised by this package."""


class EmptyAnswerError(AnswerRankError, ValueError):
    """An answer string normalizes to no tokens and cannot be matched."""


class DataError(AnswerRankError, ValueError):
    """Input data violates a record schema or a structural invariant."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class ReaderError(AnswerRankError):
    """A reader failed to produce predictions for a question."""
