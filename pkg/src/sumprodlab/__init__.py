"""Exact counting kernels for sum-product estimates over prime fields."""
from .field import PrimeField, Elem, Point3, Plane3, threshold, is_prime
from .sets import FSet, eval_expr

__all__ = ["PrimeField", "Elem", "Point3", "Plane3", "threshold", "is_prime", "FSet", "eval_expr"]
__version__ = "0.1.0"
