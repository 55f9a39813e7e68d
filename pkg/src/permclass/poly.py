"""Univariate polynomials and rational generating functions over Q.

Coefficients are stored lowest degree first as Python ints where possible
and :class:`fractions.Fraction` otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Polynomial:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_norm(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> "Polynomial":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other) -> "Polynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Polynomial":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other) -> tuple["Polynomial", "Polynomial"]:
        other = _as_poly(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        lead = other.coeffs[-1]
        dq = other.degree
        quot = [0] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            if isinstance(c, int) and isinstance(lead, int) and c % lead == 0:
                q = c // lead
            else:
                q = _norm(Fraction(c) / lead)
            quot[k - dq] = q
            for j, oc in enumerate(other.coeffs):
                rem[k - dq + j] -= q * oc
        return Polynomial(quot), Polynomial(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other) -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Polynomial":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Polynomial":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def truncate(self, n: int) -> "Polynomial":
        return Polynomial(self.coeffs[:n])

    def monic(self) -> "Polynomial":
        lead = Fraction(self.coeffs[-1])
        return Polynomial(Fraction(c) / lead for c in self.coeffs)

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive with integer coefficients."""
        if not self.coeffs:
            return Fraction(1)
        fr = [Fraction(c) for c in self.coeffs]
        den = reduce(lcm, (f.denominator for f in fr), 1)
        num = reduce(gcd, (abs(f.numerator * (den // f.denominator)) for f in fr), 0)
        return Fraction(num, den)

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"

    def __str__(self) -> str:
        return format_poly(self.coeffs)


def _as_poly(p) -> Polynomial:
    return p if isinstance(p, Polynomial) else Polynomial.const(p)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd (the zero polynomial if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic() if a else a


def format_poly(coeffs: Sequence, var: str = "x") -> str:
    """Ascending-order rendering, e.g. ``1 - 2x + x^3``."""
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}{mono}" if not isinstance(mag, Fraction) else f"({mag}){mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


class RationalGF:
    """numerator / denominator in lowest terms with denominator(0) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num, den = _as_poly(num), _as_poly(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if den[0] == 0:
            # cancel common powers of x before insisting on a unit constant term
            g = poly_gcd(num, den)
            num, den = num.exact_div(g), den.exact_div(g)
            if den[0] == 0:
                raise ValueError("denominator must have a nonzero constant term")
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
        c0 = Fraction(den[0])
        self.num = Polynomial(Fraction(c) / c0 for c in num.coeffs)
        self.den = Polynomial(Fraction(c) / c0 for c in den.coeffs)

    @classmethod
    def from_poly(cls, p) -> "RationalGF":
        return cls(p, 1)

    def series(self, n: int) -> list:
        """First ``n`` coefficients of the power series expansion."""
        out = []
        d = self.den.coeffs
        for k in range(n):
            c = self.num[k] - sum(d[j] * out[k - j] for j in range(1, min(k, len(d) - 1) + 1))
            out.append(_norm(Fraction(c)))
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = RationalGF(other)
        if not isinstance(other, RationalGF):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __add__(self, other) -> "RationalGF":
        other = _as_gf(other)
        return RationalGF(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalGF":
        return RationalGF(-self.num, self.den)

    def __sub__(self, other) -> "RationalGF":
        return self + (-_as_gf(other))

    def __rsub__(self, other) -> "RationalGF":
        return _as_gf(other) - self

    def __mul__(self, other) -> "RationalGF":
        other = _as_gf(other)
        return RationalGF(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalGF":
        other = _as_gf(other)
        return RationalGF(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalGF":
        return _as_gf(other) / self

    @property
    def constant_term(self):
        return self.series(1)[0]

    def __repr__(self) -> str:
        return f"RationalGF({list(self.num.coeffs)}, {list(self.den.coeffs)})"

    def __str__(self) -> str:
        return f"({self.num}) / ({self.den})"

    def to_json(self) -> dict:
        return {
            "numerator": [str(c) for c in self.num.coeffs],
            "denominator": [str(c) for c in self.den.coeffs],
        }


def _as_gf(p) -> RationalGF:
    return p if isinstance(p, RationalGF) else RationalGF(p)


def bareiss_det(matrix: list[list[Polynomial]]) -> Polynomial:
    """Determinant of a square polynomial matrix by fraction-free elimination."""
    m = [[_as_poly(e) for e in row] for row in matrix]
    n = len(m)
    if n == 0:
        return Polynomial.const(1)
    sign = 1
    prev = Polynomial.const(1)
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return Polynomial()
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]).exact_div(prev)
            m[i][k] = Polynomial()
        prev = pivot
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det
