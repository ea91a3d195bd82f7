"""
Base evaluator interface for cone-kernel.

Every method for S(x, eta) is wrapped in a BaseEvaluator so the harness and the
CLI can ask each one whether it applies at a point before calling it.
"""

from abc import ABC, abstractmethod
from typing import ClassVar, Optional

from ..models import ConeGeometry, EvalResult, Method
from ..settings import Settings


class BaseEvaluator(ABC):
    """Abstract base class for all S(x, eta) evaluators.

    Subclasses declare their Method tag and implement a validity predicate
    alongside the evaluation itself.
    """

    method: ClassVar[Method]

    def __init__(self, settings: Optional[Settings] = None):
        """Initialize the evaluator.

        Args:
            settings: Tunables; shipped defaults when omitted
        """
        self.settings = settings or Settings()

    @abstractmethod
    def evaluate(self, x: float, eta: float, g: ConeGeometry) -> EvalResult:
        """Evaluate S(x, eta) on the cone g.

        Returns:
            EvalResult tagged with this evaluator's method

        Raises:
            ConeKernelException: If the method cannot deliver a value
        """

    @abstractmethod
    def is_valid(self, x: float, eta: float, g: ConeGeometry) -> bool:
        """True when the method's preconditions hold at (x, eta)."""

    def get_name(self) -> str:
        """Method tag used in reports and CSV output."""
        return self.method.value
