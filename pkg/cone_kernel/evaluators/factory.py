"""
Evaluator factory and the automatic method-selection policy.

Auto mode picks the cheapest method that is valid at a point:

1. small_x below settings.small_x_auto
2. contour up to settings.contour_max_x
3. uniform beyond settings.asymptotic_min_x when its Cauchy circles fit (off the interface)
4. series everywhere else, and as the fallback when the chosen method fails
"""

from typing import Optional, Union

import structlog

from ..asymptotic import uniform_feasible
from ..exceptions import AccuracyException, DomainException, GeometryException
from ..models import ConeGeometry, EvalResult, Method
from ..settings import Settings
from .asymptotic import PreliminaryEvaluator, SmallXEvaluator, UniformEvaluator
from .base import BaseEvaluator
from .direct import ContourEvaluator, ImagesEvaluator, SeriesEvaluator

logger = structlog.get_logger(__name__)

_REGISTRY: dict[Method, type[BaseEvaluator]] = {
    Method.SERIES: SeriesEvaluator,
    Method.CONTOUR: ContourEvaluator,
    Method.SMALL_X: SmallXEvaluator,
    Method.UNIFORM: UniformEvaluator,
    Method.PRELIMINARY: PreliminaryEvaluator,
    Method.IMAGES: ImagesEvaluator,
}


def get_evaluator(
    method: Union[Method, str], settings: Optional[Settings] = None, kmax: Optional[int] = None
) -> BaseEvaluator:
    """Get the evaluator for a method tag.

    Args:
        method: Method or its string value ("small-x" is accepted for small_x)
        settings: Tunables passed to the evaluator
        kmax: Diffractive order, used by the uniform evaluator only

    Returns:
        An initialized evaluator

    Raises:
        DomainException: If the method tag is unknown

    Example:
        >>> ev = get_evaluator("contour")
        >>> ev.evaluate(2.0, 1.0, ConeGeometry(rho=1.0)).method
        <Method.CONTOUR: 'contour'>
    """
    try:
        tag = Method(method.replace("-", "_") if isinstance(method, str) else method)
    except ValueError as e:
        raise DomainException(f"unknown method: {method}") from e
    if tag is Method.UNIFORM:
        return UniformEvaluator(settings, kmax=kmax)
    return _REGISTRY[tag](settings)


def get_all_evaluators(
    settings: Optional[Settings] = None, kmax: Optional[int] = None
) -> list[BaseEvaluator]:
    """One evaluator per method, in Method declaration order."""
    return [get_evaluator(m, settings, kmax) for m in Method]


def valid_methods(
    x: float, eta: float, g: ConeGeometry, settings: Optional[Settings] = None
) -> list[Method]:
    """Methods whose validity predicate holds at (x, eta), in a fixed order."""
    return [ev.method for ev in get_all_evaluators(settings) if ev.is_valid(x, eta, g)]


def select_method(
    x: float, eta: float, g: ConeGeometry, settings: Optional[Settings] = None
) -> Method:
    """Apply the auto policy at one point."""
    settings = settings or Settings()
    if x < settings.small_x_auto:
        return Method.SMALL_X
    if x <= settings.contour_max_x:
        return Method.CONTOUR
    if x > settings.asymptotic_min_x and uniform_feasible(eta, g, settings.cauchy_radius):
        return Method.UNIFORM
    return Method.SERIES


def evaluate_auto(
    x: float,
    eta: float,
    g: ConeGeometry,
    settings: Optional[Settings] = None,
    kmax: Optional[int] = None,
) -> EvalResult:
    """Evaluate S with the auto-selected method, falling back to the series on failure."""
    settings = settings or Settings()
    method = select_method(x, eta, g, settings)
    logger.debug("method_selected", method=method.value, x=x, eta=eta, rho=g.rho)
    try:
        return get_evaluator(method, settings, kmax).evaluate(x, eta, g)
    except (AccuracyException, GeometryException) as e:
        if method is Method.SERIES:
            raise
        logger.warning(
            "method_fallback", method=method.value, fallback="series", x=x, eta=eta, error=str(e)
        )
        return SeriesEvaluator(settings).evaluate(x, eta, g)
