"""
Exception hierarchy for the cone-kernel library.

Every evaluator raises one of these so that callers (the harness and the CLI)
can map failures onto exit codes without inspecting messages.
"""

from __future__ import annotations

from typing import Optional


class ConeKernelException(Exception):
    """Base class for all cone-kernel failures"""
    pass


class DomainException(ConeKernelException):
    """Raised when an argument is non-finite or outside the function's domain"""
    pass


class AccuracyException(ConeKernelException):
    """Raised when a tolerance cannot be met within the configured work limits"""

    def __init__(
        self,
        message: str,
        best_estimate: Optional[complex] = None,
        abs_err: Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.best_estimate = best_estimate
        self.abs_err = abs_err


class GeometryException(ConeKernelException):
    """Raised when an integration contour cannot be kept clear of the poles"""
    pass


class ValidityException(ConeKernelException):
    """Raised when an asymptotic formula is requested outside its validity region"""
    pass
