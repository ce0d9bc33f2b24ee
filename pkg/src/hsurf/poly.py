"""Dense polynomial wrappers in one, two, and three variables.

Coefficients are stored as numpy arrays indexed by exponent, so ``c[i, j]``
multiplies ``x**i * y**j``.  Derivatives are computed once on the coefficient
arrays (exact), which keeps every evaluation closed-form and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P


def _as_coeff_array(c, ndim: int) -> np.ndarray:
    a = np.atleast_1d(np.asarray(c, dtype=float))
    if a.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional coefficient array, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class Poly1:
    """Univariate polynomial sum_i c[i] s^i."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs, 1))

    def __call__(self, s):
        return P.polyval(s, self.coeffs)

    def deriv(self, order: int = 1) -> "Poly1":
        return Poly1(P.polyder(self.coeffs, m=order) if self.coeffs.size > order else np.zeros(1))

    @staticmethod
    def zero() -> "Poly1":
        return Poly1(np.zeros(1))


@dataclass(frozen=True)
class Poly2:
    """Bivariate polynomial sum_{ij} c[i,j] x^i y^j."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs, 2))

    def __call__(self, x, y):
        return P.polyval2d(x, y, self.coeffs)

    def deriv(self, dx: int = 0, dy: int = 0) -> "Poly2":
        c = self.coeffs
        if dx:
            c = P.polyder(c, m=dx, axis=0) if c.shape[0] > dx else np.zeros((1, 1))
        if dy:
            c = P.polyder(c, m=dy, axis=1) if c.shape[1] > dy else np.zeros((1, 1))
        return Poly2(np.atleast_2d(c))

    @staticmethod
    def zero() -> "Poly2":
        return Poly2(np.zeros((1, 1)))


@dataclass(frozen=True)
class Poly3:
    """Trivariate polynomial sum_{ijk} c[i,j,k] x^i y^j z^k."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs, 3))

    def __call__(self, x, y, z):
        return P.polyval3d(x, y, z, self.coeffs)

    def deriv(self, axis: int) -> "Poly3":
        c = self.coeffs
        if c.shape[axis] > 1:
            c = P.polyder(c, m=1, axis=axis)
        else:
            c = np.zeros((1, 1, 1))
        return Poly3(np.atleast_3d(c))

    @staticmethod
    def zero() -> "Poly3":
        return Poly3(np.zeros((1, 1, 1)))
