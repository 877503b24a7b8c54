"""Minimal forward-mode dual numbers.

Used to differentiate the curvature-matrix field exactly (to machine
precision, no truncation error) along a coordinate direction: seed the jet
entries with their own directional derivatives and push them through the
chart formula.
"""

from __future__ import annotations

import math


class Dual:
    """value + first derivative along one fixed direction."""

    __slots__ = ("val", "der")

    def __init__(self, val: float, der: float = 0.0):
        self.val = float(val)
        self.der = float(der)

    def __repr__(self):
        return f"Dual({self.val!r}, {self.der!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.der + other.der)
        return Dual(self.val + other, self.der)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.der - other.der)
        return Dual(self.val - other, self.der)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.der)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val, self.der * other.val + self.val * other.der)
        return Dual(self.val * other, self.der * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.val
            return Dual(self.val * inv, (self.der - self.val * other.der * inv) * inv)
        return Dual(self.val / other, self.der / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        return Dual(other * inv, -other * self.der * inv * inv)

    def __pow__(self, p):
        v = self.val**p
        return Dual(v, p * self.val ** (p - 1) * self.der)


def dual_sqrt(x):
    if isinstance(x, Dual):
        s = math.sqrt(x.val)
        return Dual(s, 0.5 * x.der / s)
    return math.sqrt(x)


def dual_log(x):
    if isinstance(x, Dual):
        return Dual(math.log(x.val), x.der / x.val)
    return math.log(x)


def value(x) -> float:
    return x.val if isinstance(x, Dual) else float(x)


def deriv(x) -> float:
    return x.der if isinstance(x, Dual) else 0.0
