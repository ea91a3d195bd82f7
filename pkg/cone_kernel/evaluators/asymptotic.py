"""Evaluators backed by the small-x and large-x expansions."""

from typing import Optional

from ..asymptotic import (
    PRELIMINARY_MIN_DISTANCE,
    s_preliminary,
    s_small_x,
    s_uniform,
    uniform_feasible,
)
from ..kernel import interface_distance
from ..models import ConeGeometry, EvalResult, Method
from ..settings import Settings
from .base import BaseEvaluator


class SmallXEvaluator(BaseEvaluator):
    """S = 1 with the explicit majorant, for x < 2."""

    method = Method.SMALL_X

    def evaluate(self, x: float, eta: float, g: ConeGeometry) -> EvalResult:
        return s_small_x(x, eta, g)

    def is_valid(self, x: float, eta: float, g: ConeGeometry) -> bool:
        return 0.0 <= x < 2.0


class UniformEvaluator(BaseEvaluator):
    """Uniform large-x expansion; valid off the interface for x above the asymptotic floor."""

    method = Method.UNIFORM

    def __init__(self, settings: Optional[Settings] = None, kmax: Optional[int] = None):
        """Initialize the evaluator.

        Args:
            settings: Tunables; shipped defaults when omitted
            kmax: Number of diffractive corrections (settings.kmax when omitted)
        """
        super().__init__(settings)
        self.kmax = self.settings.kmax if kmax is None else kmax

    def evaluate(self, x: float, eta: float, g: ConeGeometry) -> EvalResult:
        return s_uniform(
            x,
            eta,
            g,
            self.kmax,
            nodes=self.settings.cauchy_nodes,
            radius=self.settings.cauchy_radius,
        )

    def is_valid(self, x: float, eta: float, g: ConeGeometry) -> bool:
        return x >= self.settings.asymptotic_min_x and uniform_feasible(
            eta, g, self.settings.cauchy_radius
        )


class PreliminaryEvaluator(BaseEvaluator):
    """Leading non-uniform expansion; needs eta well away from the interface."""

    method = Method.PRELIMINARY

    def evaluate(self, x: float, eta: float, g: ConeGeometry) -> EvalResult:
        return s_preliminary(x, eta, g)

    def is_valid(self, x: float, eta: float, g: ConeGeometry) -> bool:
        return (
            x >= self.settings.asymptotic_min_x
            and interface_distance(eta, g) >= PRELIMINARY_MIN_DISTANCE
        )
