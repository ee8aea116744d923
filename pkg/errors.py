#!/usr/bin/env python3
"""
Exception hierarchy shared by every module of the toolkit.

Each error carries the process exit code the command line maps it to:
2 for bad input, 3 for a resource cap.
"""

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


class PaqsError(Exception):
    """Base class for all toolkit errors"""
    exit_code = EXIT_INPUT


class ConfigError(PaqsError):
    pass


class FormulaSyntaxError(PaqsError):
    """Malformed formula text; `position` is a 0-based character offset"""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ProofScriptError(PaqsError):
    pass


class ResourceLimitError(PaqsError):
    exit_code = EXIT_RESOURCE


class DimensionMismatchError(PaqsError):
    def __init__(self, left, right, what="operands"):
        super().__init__(f"Dimension mismatch between {what}: {left} != {right}")
        self.left = left
        self.right = right


class InvariantViolation(PaqsError):
    pass


class ConvergenceError(PaqsError):
    pass


class UnknownPowerError(PaqsError):
    pass


class ContradictionRejected(PaqsError):
    """A pair of powers failed validation as contradictory"""

    def __init__(self, reason, detail=""):
        message = reason if not detail else f"{reason}: {detail}"
        super().__init__(message)
        self.reason = reason


class LatticeError(PaqsError):
    pass


class ScenarioError(PaqsError):
    """Scenario invariant violation; `path` points into the JSON document"""

    def __init__(self, message, path=""):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path


class ScenarioParseError(ScenarioError):
    def __init__(self, message, line=None, column=None):
        location = f"line {line}, column {column}" if line is not None else ""
        super().__init__(message, location)
        self.line = line
        self.column = column


class ScenarioReferenceError(ScenarioError):
    pass
