"""Evaluators that compute S directly: Bessel series, loop contour and images sum."""

from ..asymptotic import images_order, s_images
from ..contour import s_contour
from ..models import ConeGeometry, EvalResult, Method
from ..series import s_series
from .base import BaseEvaluator


class SeriesEvaluator(BaseEvaluator):
    """Bessel-Fourier series; valid everywhere, the reference oracle."""

    method = Method.SERIES

    def evaluate(self, x: float, eta: float, g: ConeGeometry) -> EvalResult:
        return s_series(x, eta, g, self.settings.series_config())

    def is_valid(self, x: float, eta: float, g: ConeGeometry) -> bool:
        return x >= 0.0


class ContourEvaluator(BaseEvaluator):
    """Loop-integral quadrature; valid on the interface, limited to moderate x."""

    method = Method.CONTOUR

    def evaluate(self, x: float, eta: float, g: ConeGeometry) -> EvalResult:
        return s_contour(x, eta, g, self.settings.contour_spec())

    def is_valid(self, x: float, eta: float, g: ConeGeometry) -> bool:
        return 0.0 < x <= self.settings.contour_max_x


class ImagesEvaluator(BaseEvaluator):
    """Finite images sum, exact when 1/rho is an integer."""

    method = Method.IMAGES

    def evaluate(self, x: float, eta: float, g: ConeGeometry) -> EvalResult:
        return s_images(x, eta, g)

    def is_valid(self, x: float, eta: float, g: ConeGeometry) -> bool:
        return x >= 0.0 and images_order(g) is not None
