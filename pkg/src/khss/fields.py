"""Coefficient fields: GF(2), GF(p) and Q.

Elements are plain Python ints for finite fields and ints or
``fractions.Fraction`` for Q.  Everything is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class Field:
    """A prime field GF(p) (``char = p``) or Q (``char = 0``)."""

    char: int

    @property
    def name(self) -> str:
        return "Q" if self.char == 0 else f"GF({self.char})"

    def normalize(self, x):
        if self.char:
            return int(x) % self.char
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        return x

    def inv(self, x):
        if self.char:
            x %= self.char
            if x == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(x, -1, self.char)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if x == 1 or x == -1:
            return x
        return Fraction(1) / x

    def div(self, a, b):
        if self.char:
            return (a * self.inv(b)) % self.char
        if isinstance(a, int) and isinstance(b, int) and a % b == 0:
            return a // b
        return self.normalize(Fraction(a) / b)

    def __str__(self) -> str:
        return self.name


def as_field(spec) -> Field:
    """Parse ``"Q"``, ``"GF2"``, ``"GF(3)"``, ``"F5"``, an int prime or a Field."""
    if isinstance(spec, Field):
        return spec
    if isinstance(spec, int):
        p = spec
    else:
        s = str(spec).strip().upper().replace(" ", "")
        if s in ("Q", "QQ", "0"):
            return Field(0)
        for pre in ("GF(", "F(", "Z/", "GF", "F"):
            if s.startswith(pre):
                s = s[len(pre):]
                break
        s = s.rstrip(")")
        if not s.isdigit():
            raise FieldError(f"unknown field {spec!r}")
        p = int(s)
    if p == 0:
        return Field(0)
    if not _is_prime(p):
        raise FieldError(f"{p} is not prime")
    return Field(p)


GF2 = Field(2)
Q = Field(0)
