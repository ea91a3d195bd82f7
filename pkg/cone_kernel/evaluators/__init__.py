"""
Evaluator backends for S(x, eta).

Each numerical method sits behind the BaseEvaluator interface with its own
validity predicate; the factory builds them and implements auto selection.
"""

from .asymptotic import PreliminaryEvaluator, SmallXEvaluator, UniformEvaluator
from .base import BaseEvaluator
from .direct import ContourEvaluator, ImagesEvaluator, SeriesEvaluator
from .factory import (
    evaluate_auto,
    get_all_evaluators,
    get_evaluator,
    select_method,
    valid_methods,
)

__all__ = [
    "BaseEvaluator",
    "SeriesEvaluator",
    "ContourEvaluator",
    "ImagesEvaluator",
    "SmallXEvaluator",
    "UniformEvaluator",
    "PreliminaryEvaluator",
    "get_evaluator",
    "get_all_evaluators",
    "valid_methods",
    "select_method",
    "evaluate_auto",
]
