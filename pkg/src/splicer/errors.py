"""Exception hierarchy shared by all splicer modules."""

from __future__ import annotations


class SpliceError(Exception):
    """Base class for every error raised by splicer."""


class SpliceSyntaxError(SpliceError):
    def __init__(self, message: str, location=None):
        self.location = location
        where = f" at {location}" if location is not None else ""
        super().__init__(f"{message}{where}")


class SpliceTypeError(SpliceError):
    def __init__(self, message: str, location=None, expected=None, actual=None):
        self.location = location
        self.expected = expected
        self.actual = actual
        parts = [message]
        if expected is not None or actual is not None:
            parts.append(f"(expected {expected}, got {actual})")
        if location is not None:
            parts.append(f"at {location}")
        super().__init__(" ".join(parts))


class AmbiguousType(SpliceTypeError):
    """An expression hole whose context does not force a unique type."""


class NotAnExprHole(SpliceError):
    pass


class MissingRequirement(SpliceError):
    pass


class DuplicateSolutionMarker(SpliceError):
    pass


class DuplicateApi(SpliceError):
    pass


class KindMismatch(SpliceError):
    pass


class EmptyIndex(SpliceError):
    pass


class IngestError(SpliceError):
    def __init__(self, file, reason):
        self.file = file
        self.reason = reason
        super().__init__(f"{file}: {reason}")


class EvalError(SpliceError):
    """Evaluation aborted; ``trace`` holds the API events emitted so far."""

    def __init__(self, message: str, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class EvalTimeout(EvalError):
    pass


class EvalRuntimeError(EvalError):
    KINDS = ("divByZero", "indexOutOfBounds", "nullRead", "badParse",
             "stackOverflow", "missingReturn", "badAlloc", "apiError")

    def __init__(self, kind: str, detail: str = "", trace=()):
        self.kind = kind
        super().__init__(f"{kind}: {detail}" if detail else kind, trace)
