"""Composite quadrature rules shared by the special functions and the contour integrals."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

# Nodes per Gauss-Legendre panel
PANEL_ORDER = 16


@lru_cache(maxsize=8)
def _reference_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panel_rule(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = _reference_rule(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def composite_gauss_legendre(
    a: float, b: float, panels: int, order: int = PANEL_ORDER
) -> tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre rule on [a, b] split into equal panels.

    Args:
        a: Left end
        b: Right end
        panels: Number of equal-width panels
        order: Nodes per panel

    Returns:
        (nodes, weights) as flat arrays
    """
    return _panel_rule(np.linspace(a, b, panels + 1), order)


def graded_gauss_legendre(
    a: float, b: float, panels: int, order: int = PANEL_ORDER
) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on [a, b] (0 < a < b) with geometrically growing panels."""
    edges = a * (b / a) ** (np.arange(panels + 1) / panels)
    edges[-1] = b
    return _panel_rule(edges, order)


def circle_angles(n: int) -> np.ndarray:
    """Equispaced trapezoid angles 2*pi*k/n on the circle."""
    return 2.0 * np.pi * np.arange(n) / n
