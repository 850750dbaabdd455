"""Integer Laurent polynomials in one variable."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Mapping


class LaurentPoly:
    """Sparse Laurent polynomial with integer coefficients (immutable)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        self._c = {int(e): int(v) for e, v in (coeffs or {}).items() if v}

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def from_list(cls, coeffs: Iterable[int], low: int = 0) -> "LaurentPoly":
        return cls({low + k: v for k, v in enumerate(coeffs)})

    # structure --------------------------------------------------------------
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def __getitem__(self, e: int) -> int:
        return self._c.get(e, 0)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def min_exp(self) -> int:
        return min(self._c) if self._c else 0

    @property
    def max_exp(self) -> int:
        return max(self._c) if self._c else 0

    def to_list(self) -> tuple[int, list[int]]:
        """(lowest exponent, coefficients from lowest to highest)."""
        if not self._c:
            return 0, []
        lo, hi = self.min_exp, self.max_exp
        return lo, [self._c.get(e, 0) for e in range(lo, hi + 1)]

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e + k: v for e, v in self._c.items()})

    def substitute_inverse(self) -> "LaurentPoly":
        return LaurentPoly({-e: v for e, v in self._c.items()})

    def abs_coeff_sum(self) -> int:
        return sum(abs(v) for v in self._c.values())

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._c)
        for e, v in other._c.items():
            out[e] = out.get(e, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: dict[int, int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + v1 * v2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient when ``other`` divides ``self`` exactly; raises otherwise."""
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly()
        rem = dict(self._c)
        dhi = other.max_exp
        dlead = other._c[dhi]
        q: dict[int, int] = {}
        lo_limit = self.min_exp - other.min_exp
        while rem:
            hi = max(rem)
            e = hi - dhi
            if e < lo_limit or rem[hi] % dlead:
                raise ArithmeticError("inexact Laurent division")
            f = rem[hi] // dlead
            q[e] = f
            for e2, v2 in other._c.items():
                k = e + e2
                nv = rem.get(k, 0) - f * v2
                if nv:
                    rem[k] = nv
                else:
                    rem.pop(k, None)
        return LaurentPoly(q)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return isinstance(other, LaurentPoly) and self._c == other._c

    def __hash__(self):
        return hash(tuple(sorted(self._c.items())))

    # evaluation -------------------------------------------------------------
    def evaluate(self, x):
        """Value at a nonzero number ``x`` (int, Fraction, complex); exact for ints."""
        if isinstance(x, int):
            if x in (1, -1):
                return sum(v * (x if e % 2 else 1) for e, v in self._c.items())
            x = Fraction(x)
        val = sum(v * x ** e for e, v in self._c.items())
        if isinstance(val, Fraction) and val.denominator == 1:
            return val.numerator
        return val

    def at_sqrt_minus_one(self) -> tuple[int, int]:
        """Exact value at ``i`` as a Gaussian integer (real, imaginary)."""
        re = im = 0
        for e, v in self._c.items():
            r = e % 4
            if r == 0:
                re += v
            elif r == 1:
                im += v
            elif r == 2:
                re -= v
            else:
                im -= v
        return re, im

    def __str__(self) -> str:
        return self.format("t")

    def format(self, var: str = "t") -> str:
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c):
            v = self._c[e]
            mag = abs(v)
            if e == 0:
                body = str(mag)
            else:
                pw = var if e == 1 else f"{var}^{e}"
                body = pw if mag == 1 else f"{mag}*{pw}"
            parts.append(("-" if v < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self) -> str:
        return f"LaurentPoly({self.format()})"


def _coerce(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a Laurent polynomial")


def gaussian_abs(re: int, im: int) -> int:
    """|re + i im| when it is an integer; raises otherwise."""
    n = re * re + im * im
    r = isqrt(n)
    if r * r != n:
        raise ValueError(f"|{re} + {im}i| is not an integer")
    return r
