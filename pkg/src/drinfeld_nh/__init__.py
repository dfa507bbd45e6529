"""Exact arithmetic for Drinfeld quasi-modular and nearly holomorphic forms."""

from .field import GF, Poly, RatF, field
from .useries import PrecisionError, USeries, hyper

__all__ = ["GF", "Poly", "RatF", "field", "PrecisionError", "USeries", "hyper"]
