"""Exact quaternion arithmetic over the rationals.

Used for the pointwise kernel identity on the unit quaternion group: with
left-invariant fields q -> q * (w_l xi_l), xi = (i, j, k), and the complex
structures acting by right multiplication, the inclusion map q -> q lies
in the kernel of the operator exactly when w_1 + w_2 + w_3 = 0.  All
arithmetic below is over fractions so the zero is exact, not a float
residual.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = ["Quaternion", "UNIT_SAMPLES", "su2_counterexample_residual"]


class Quaternion:
    """Quaternion with Fraction components (w + x i + y j + z k)."""

    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w=0, x=0, y=0, z=0):
        self.w = Fraction(w)
        self.x = Fraction(x)
        self.y = Fraction(y)
        self.z = Fraction(z)

    def __add__(self, other):
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a, b, c, d = self.w, self.x, self.y, self.z
            e, f, g, h = other.w, other.x, other.y, other.z
            return Quaternion(
                a * e - b * f - c * g - d * h,
                a * f + b * e + c * h - d * g,
                a * g - b * h + c * e + d * f,
                a * h + b * g - c * f + d * e,
            )
        return Quaternion(self.w * other, self.x * other,
                          self.y * other, self.z * other)

    def __rmul__(self, scalar):
        return self * scalar

    def __eq__(self, other):
        return (self.w, self.x, self.y, self.z) == (other.w, other.x, other.y, other.z)

    def __repr__(self):
        return f"Quaternion({self.w}, {self.x}, {self.y}, {self.z})"

    def norm_sq(self) -> Fraction:
        return self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2

    def norm(self) -> float:
        n2 = self.norm_sq()
        if n2 == 0:
            return 0.0
        return math.sqrt(float(n2))


ONE = Quaternion(1)
I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)
K = Quaternion(0, 0, 0, 1)
_XI = (I, J, K)

# exact unit quaternions: the 8 axis units and the 16 half-integer units
UNIT_SAMPLES = tuple(
    [Quaternion(*(s if a == ax else 0 for a in range(4)))
     for ax in range(4) for s in (1, -1)]
    + [Quaternion(Fraction(sw, 2), Fraction(sx, 2), Fraction(sy, 2), Fraction(sz, 2))
       for sw in (1, -1) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]
)


def _residual_at(q: Quaternion, weights) -> Quaternion:
    """sum_l J_l (q * w_l xi_l) with J_l acting by right multiplication."""
    total = Quaternion()
    for w, xi in zip(weights, _XI):
        total = total + (q * (xi * Fraction(w))) * xi
    return total


def su2_counterexample_residual(weights, samples=UNIT_SAMPLES) -> float:
    """Max norm of the kernel-identity residual over sample unit quaternions.

    weights are the frame coefficients (w_1, w_2, w_3) of the left-invariant
    fields w_l xi_l.  Exact rational weights give an exact result; in
    particular the balanced choice (2, -1, -1) returns 0.0 exactly.
    """
    if len(tuple(weights)) != 3:
        raise ValueError("weights must have length 3")
    worst = Fraction(0)
    for q in samples:
        n2 = _residual_at(q, weights).norm_sq()
        if n2 > worst:
            worst = n2
    if worst == 0:
        return 0.0
    return math.sqrt(float(worst))
