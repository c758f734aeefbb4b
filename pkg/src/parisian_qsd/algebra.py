"""First-order square-root expansion arithmetic.

Quantities of the form  f(q) = f0 + f1 * sqrt(q - q_edge) + o(sqrt(.))  are
represented as pairs (val, half) and combined with the exact product /
quotient / composition rules for such expansions.  Plain numbers pass through
every helper unchanged, so the same formula code evaluates either a resolvent
at a real killing rate or its expansion coefficients at the branch point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Expansion", "lift", "val_of", "half_of", "afn", "aexp", "ajp"]


@dataclass(frozen=True)
class Expansion:
    val: complex
    half: complex

    def _pair(self, other):
        if isinstance(other, Expansion):
            return other
        return Expansion(other, 0.0)

    def __add__(self, other):
        o = self._pair(other)
        return Expansion(self.val + o.val, self.half + o.half)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._pair(other)
        return Expansion(self.val - o.val, self.half - o.half)

    def __rsub__(self, other):
        o = self._pair(other)
        return Expansion(o.val - self.val, o.half - self.half)

    def __neg__(self):
        return Expansion(-self.val, -self.half)

    def __mul__(self, other):
        o = self._pair(other)
        return Expansion(self.val * o.val, self.val * o.half + self.half * o.val)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._pair(other)
        return Expansion(self.val / o.val,
                         (self.half * o.val - o.half * self.val) / (o.val * o.val))

    def __rtruediv__(self, other):
        o = self._pair(other)
        return o.__truediv__(self)


def lift(x):
    return x if isinstance(x, Expansion) else Expansion(x, 0.0)


def val_of(z):
    return z.val if isinstance(z, Expansion) else z


def half_of(z):
    return z.half if isinstance(z, Expansion) else 0.0


def afn(z, f, df):
    """Apply a smooth scalar function through the expansion."""
    if isinstance(z, Expansion):
        return Expansion(f(z.val), z.half * df(z.val))
    return f(z)


def aexp(z):
    return afn(z, np.exp, np.exp)


def ajp(p, z):
    from .scale import jp
    return afn(z, lambda u: jp(p, u), lambda u: jp(p + 1, u))
