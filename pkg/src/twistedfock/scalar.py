"""Exact arithmetic in the 8th cyclotomic field Q(zeta), zeta = exp(i*pi/4).

Elements are stored as four rationals over the power basis {1, z, z^2, z^3}
with the reduction z^4 = -1.  ``I`` (= z^2) is the square root of -1 used by
the vertex operators.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from gmpy2 import mpq

Rational = Union[int, Fraction, "mpq"]

_MPQ = type(mpq(0))


def Q(x=0, d=1) -> "mpq":
    """Coerce an int / Fraction / 'p/q' string to an mpq."""
    if type(x) is int:
        return mpq(x, d)
    if isinstance(x, str):
        return mpq(Fraction(x))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if d != 1:
        return mpq(x, d)
    return mpq(x)


def qstr(x) -> str:
    """Canonical 'p/q' (or 'p') string for a rational."""
    x = Q(x) if not isinstance(x, _MPQ) else x
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


_ZERO = mpq(0)
_ONE = mpq(1)


class Cyclo8:
    """An element a0 + a1 z + a2 z^2 + a3 z^3 of Q(zeta_8)."""

    __slots__ = ("c", "_hash")

    def __init__(self, coords: Iterable = (0, 0, 0, 0)):
        c = tuple(x if isinstance(x, _MPQ) else Q(x) for x in coords)
        if len(c) != 4:
            raise ValueError("Cyclo8 needs exactly four coordinates")
        self.c = c
        self._hash = None

    @classmethod
    def _make(cls, c: tuple) -> "Cyclo8":
        # trusted constructor: c is already a 4-tuple of mpq
        obj = object.__new__(cls)
        obj.c = c
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, x) -> "Cyclo8":
        return cls((x, 0, 0, 0))

    @classmethod
    def zeta_power(cls, k: int) -> "Cyclo8":
        """zeta**k for any integer k."""
        k %= 8
        sign = 1
        if k >= 4:
            k -= 4
            sign = -1
        c = [0, 0, 0, 0]
        c[k] = sign
        return cls(c)

    @classmethod
    def minus_one_power(cls, q) -> "Cyclo8":
        """(-1)**q := zeta**(4q); q must lie in (1/4)Z."""
        q = Q(q) if not isinstance(q, _MPQ) else q
        four_q = 4 * q
        if four_q.denominator != 1:
            raise ValueError(f"(-1)^{q} is not an 8th root of unity")
        return cls.zeta_power(int(four_q))

    # ring structure ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Cyclo8):
            other = Cyclo8.rational(other)
        a, b = self.c, other.c
        return Cyclo8._make((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    __radd__ = __add__

    def __neg__(self):
        a = self.c
        return Cyclo8._make((-a[0], -a[1], -a[2], -a[3]))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclo8):
            x = other if isinstance(other, _MPQ) else Q(other)
            a = self.c
            return Cyclo8._make((a[0] * x, a[1] * x, a[2] * x, a[3] * x))
        a0, a1, a2, a3 = self.c
        b0, b1, b2, b3 = other.c
        return Cyclo8._make((
            a0 * b0 - a1 * b3 - a2 * b2 - a3 * b1,
            a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2,
            a0 * b2 + a1 * b1 + a2 * b0 - a3 * b3,
            a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0,
        ))

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclo8":
        """Complex conjugation zeta -> zeta^-1 = -zeta^3."""
        a0, a1, a2, a3 = self.c
        return Cyclo8((a0, -a3, -a2, -a1))

    def _galois(self, k: int) -> "Cyclo8":
        out = Cyclo8()
        for i, a in enumerate(self.c):
            if a:
                out = out + Cyclo8.zeta_power(i * k) * a
        return out

    def inverse(self) -> "Cyclo8":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(zeta_8)")
        others = Cyclo8.rational(1)
        for k in (3, 5, 7):
            others = others * self._galois(k)
        n = (self * others).c[0]
        return others * (1 / n)

    def __truediv__(self, other):
        if not isinstance(other, Cyclo8):
            x = other if isinstance(other, _MPQ) else Q(other)
            return self * (1 / x)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Cyclo8.rational(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = Cyclo8.rational(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparisons ------------------------------------------------------
    def __bool__(self):
        a = self.c
        return bool(a[0] or a[1] or a[2] or a[3])

    def __eq__(self, other):
        if isinstance(other, Cyclo8):
            return self.c == other.c
        if isinstance(other, (int, Fraction, _MPQ)):
            a = self.c
            return a[0] == other and not (a[1] or a[2] or a[3])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            a = self.c
            if not (a[1] or a[2] or a[3]):
                self._hash = hash(a[0])
            else:
                self._hash = hash(a)
        return self._hash

    def is_rational(self) -> bool:
        a = self.c
        return not (a[1] or a[2] or a[3])

    def to_strings(self) -> list[str]:
        return [qstr(x) for x in self.c]

    @classmethod
    def from_strings(cls, items) -> "Cyclo8":
        return cls(Q(s) for s in items)

    def __repr__(self):
        names = ("", "z", "z^2", "z^3")
        parts = []
        for a, n in zip(self.c, names):
            if not a:
                continue
            s = qstr(a)
            if n:
                s = n if a == 1 else ("-" + n if a == -1 else f"{s}*{n}")
            parts.append(s)
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


ZERO = Cyclo8()
ONE = Cyclo8.rational(1)
ZETA = Cyclo8.zeta_power(1)
I = Cyclo8.zeta_power(2)
