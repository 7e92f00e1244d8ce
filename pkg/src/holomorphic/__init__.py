"""Analytic continuation, Cauchy transforms and the argument-principle verifier."""

from .continuation import Sector, continued_density, sector_for
from .cauchy import cauchy_continued, cauchy_upper
from .contour import Contour, build_contour
from .winding import winding_number
from .ui_verifier import ui_verify

__all__ = [
    "Sector",
    "continued_density",
    "sector_for",
    "cauchy_continued",
    "cauchy_upper",
    "Contour",
    "build_contour",
    "winding_number",
    "ui_verify",
]
