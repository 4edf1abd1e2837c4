"""
Exception types raised by the numerical core and the trainer.
"""

from typing import Any, Dict, Optional


class NonFiniteError(ArithmeticError):
    """A gradient, observation or loss contained NaN or infinity."""


class TrainingDivergedError(RuntimeError):
    """The policy update produced a non-finite loss."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
