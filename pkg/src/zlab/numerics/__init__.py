"""Numerical substrate: double-double pairs, adaptive panels, special functions."""

from . import ddouble
from .ddouble import DD, DDComplex

__all__ = ["ddouble", "DD", "DDComplex"]
