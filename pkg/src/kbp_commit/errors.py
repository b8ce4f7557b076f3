from __future__ import annotations

from typing import Optional


class KbpError(Exception):
    """Base class for every error raised by kbp_commit."""


class ConfigInvalid(KbpError):
    pass


class MissingKnowledgeInput(KbpError):
    """A step function was called without a knowledge test it needs (a generator bug)."""


class HorizonExceeded(KbpError):
    pass


class FormulaSyntaxError(KbpError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class UnknownAtom(KbpError):
    pass


class InfeasibleObligation(KbpError):
    pass


class ObservabilityViolation(KbpError):
    pass


class CandidateFileError(KbpError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class BoundUnreachable(KbpError):
    pass
