"""Orbifold base divisors and C-pair morphism checks over exact rationals."""

from .kernel import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
