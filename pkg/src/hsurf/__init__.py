"""Numerical laboratory for free-boundary surfaces of prescribed mean curvature."""

__version__ = "0.1.0"
