"""
Error types shared by the engines.

Precondition violations are plain ValueError; the two classes here mark
failures of the mathematics itself, which the CLI maps to distinct exit codes.
"""

from typing import Any, List, Optional


class InternalConsistencyError(RuntimeError):
    """A computed invariant that must hold did not (non-unique label, non-chain filtration, ...)."""

    def __init__(self, message: str, trace: Optional[Any] = None):
        super().__init__(message)
        self.trace = trace


class VerificationFailure(RuntimeError):
    """A verification suite found failing rows."""

    def __init__(self, message: str, failures: Optional[List[Any]] = None):
        super().__init__(message)
        self.failures = failures or []
