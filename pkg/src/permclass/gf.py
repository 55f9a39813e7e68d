"""Generating functions: truncated series, rational fitting, and the
algebraic system counting a substitution closure by property sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from .classes import ClassSpec, member
from .perm import Perm, simples
from .poly import Polynomial, RationalGF
from .properties import (
    AV,
    SKEW,
    SUM,
    Property,
    PropertyFamily,
    PropertySet,
    family_pb,
    framework_mask,
    singleton_profile,
)


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class Series:
    """Coefficients c_0..c_horizon of a power series; nothing is known beyond."""

    coeffs: tuple[int, ...]

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "Series":
        """Counts for lengths 1..n, with no empty permutation."""
        return cls((0,) + tuple(counts))

    @property
    def horizon(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        if not 0 <= n <= self.horizon:
            raise IndexError(f"coefficient {n} is beyond the horizon {self.horizon}")
        return self.coeffs[n]

    def __add__(self, other: "Series") -> "Series":
        h = min(self.horizon, other.horizon)
        return Series(tuple(a + b for a, b in zip(self.coeffs[: h + 1], other.coeffs[: h + 1])))

    def __sub__(self, other: "Series") -> "Series":
        h = min(self.horizon, other.horizon)
        return Series(tuple(a - b for a, b in zip(self.coeffs[: h + 1], other.coeffs[: h + 1])))

    def __mul__(self, other: "Series") -> "Series":
        h = min(self.horizon, other.horizon)
        return Series(tuple(_convolve(self.coeffs, other.coeffs, h)))

    def counts(self) -> list[int]:
        return list(self.coeffs[1:])


def _convolve(a: Sequence, b: Sequence, h: int) -> list:
    out = [0] * (h + 1)
    for i, ai in enumerate(a[: h + 1]):
        if ai:
            for j in range(0, h + 1 - i):
                out[i + j] += ai * b[j]
    return out


# --- rational fitting --------------------------------------------------------------------

HELD_OUT = 4


def _solve(rows: list[list[Fraction]], rhs: list[Fraction], n: int) -> list[Fraction] | None:
    """One solution of an exact linear system, or None if inconsistent."""
    m = [row[:] + [r] for row, r in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(all(v == 0 for v in row[:n]) and row[n] != 0 for row in m):
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = m[i][n]
    return sol


def fit_rational(s: Series, max_deg: int) -> RationalGF | None:
    """The simplest rational function with denominator degree at most max_deg
    reproducing every known coefficient.

    The last four coefficients are held out of the fit and only used to check
    it.  Candidates are tried by increasing total degree.  Returns None when
    nothing fits.
    """
    if s.horizon < 2 * max_deg + HELD_OUT:
        raise InsufficientData(f"horizon {s.horizon} is below 2*{max_deg}+{HELD_OUT}")
    c = [Fraction(v) for v in s.coeffs]
    train = s.horizon - HELD_OUT
    for total in range(0, 2 * max_deg + 2):
        for q in range(0, min(max_deg, total) + 1):
            p = total - q
            if p > max_deg + 1 or train - p < q:
                continue
            rows = [[c[k - j] if k - j >= 0 else Fraction(0) for j in range(1, q + 1)] for k in range(p + 1, train + 1)]
            rhs = [-c[k] for k in range(p + 1, train + 1)]
            d = _solve(rows, rhs, q)
            if d is None:
                continue
            den = Polynomial([1] + d)
            num = (Polynomial(c) * den).truncate(p + 1)
            gf = RationalGF(num, den)
            if gf.series(s.horizon + 1) == list(s.coeffs):
                return gf
    return None


# --- growth rates --------------------------------------------------------------------------


def growth_rate(s: Series) -> tuple[float, float]:
    """An interval meant to bracket the exponential growth rate.

    Built from the ratios c_n / c_(n-1) and the roots c_n^(1/n) over the
    upper half of the known coefficients.
    """
    if s.horizon < 8:
        raise InsufficientData("need coefficients up to at least n = 8")
    tail = range(s.horizon // 2, s.horizon + 1)
    if any(s[n] <= 0 for n in tail):
        raise InsufficientData("coefficients in the tail must be positive")
    estimates = []
    for n in tail:
        estimates.append(math.exp(math.log(s[n]) / n))
        if n > s.horizon // 2:
            estimates.append(s[n] / s[n - 1])
    return min(estimates), max(estimates)


def kappa(digits: int = 30) -> Decimal:
    """The real root of x^3 - 2x^2 - 1 = 0, to the given number of significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits + 10
        x = Decimal(2.2)
        for _ in range(200):
            fx = x**3 - 2 * x**2 - 1
            step = fx / (3 * x**2 - 4 * x)
            x -= step
            if abs(step) < Decimal(10) ** -(digits + 5):
                break
        ctx.prec = digits
        return +x


# --- the closure system -----------------------------------------------------------------------


class SimplesBeyondBound(ValueError):
    def __init__(self, message: str, length: int):
        super().__init__(message)
        self.length = length


@dataclass(frozen=True)
class Term:
    skeleton: Perm
    cells: tuple[PropertySet, ...]


@dataclass
class AlgebraicSystem:
    """f_Q = sum over frameworks sigma[Q_1..Q_m] with property set Q of prod f_(Q_i).

    The singleton's set additionally gets the monomial x.
    """

    family: PropertyFamily
    seed: PropertySet
    variables: list[PropertySet]
    equations: dict[PropertySet, list[Term]]
    simples_used: list[Perm]

    def render(self) -> list[str]:
        name = {q: f"f{i}" for i, q in enumerate(self.variables)}
        lines = [f"{name[q]} = f[{self.family.describe(q)}]" for q in self.variables]
        for q in self.variables:
            terms = ["x"] if q == self.seed else []
            for t in self.equations[q]:
                terms.append(f"{t.skeleton}[" + ",".join(name[c] for c in t.cells) + "]")
            lines.append(f"{name[q]} = " + (" + ".join(terms) or "0"))
        return lines


def closure_family(basis: Iterable[Sequence[int]]) -> PropertyFamily:
    """Sum/skew decomposability, Av of every pattern of the basis, and Av(12), Av(21)."""
    fam = family_pb(basis)
    return fam.extended([(1, 2), (2, 1)])


def _first_cell_ok(sigma: Perm, cell: PropertySet, fam: PropertyFamily) -> bool:
    if sigma == (1, 2):
        return not fam.has(cell, Property(SUM))
    if sigma == (2, 1):
        return not fam.has(cell, Property(SKEW))
    return True


def closure_system(c: ClassSpec, basis: Iterable[Sequence[int]] = (), bound: int = 7) -> AlgebraicSystem:
    """The system for the substitution closure of c, sharpened by the patterns of basis.

    Simple members of c are searched up to ``bound``; finding one at the
    bound itself means the search did not close and is an error.
    """
    fam = closure_family(basis)
    found = [s for n in range(2, bound + 1) for s in simples(n) if member(c, s)]
    if any(len(s) == bound for s in found):
        raise SimplesBeyondBound(f"simple members of length {bound}; raise the bound", bound)
    seed = singleton_profile(fam)
    domain = {seed}
    equations: dict[PropertySet, set[Term]] = {}
    frontier = True
    while frontier:
        frontier = False
        current = sorted(domain)
        for sigma in found:
            for cells in product(current, repeat=len(sigma)):
                if not _first_cell_ok(sigma, cells[0], fam):
                    continue
                q = framework_mask(sigma, cells, fam)
                t = Term(sigma, cells)
                if t in equations.setdefault(q, set()):
                    continue
                equations[q].add(t)
                if q not in domain:
                    domain.add(q)
                    frontier = True
    variables = sorted(domain)
    eqs = {q: sorted(equations.get(q, ()), key=lambda t: (len(t.skeleton), t.skeleton, t.cells)) for q in variables}
    return AlgebraicSystem(fam, seed, variables, eqs, found)


def solve_series(system: AlgebraicSystem, horizon: int) -> dict[PropertySet, Series]:
    """Power series solutions up to x^horizon by fixed-point iteration."""
    zero = [0] * (horizon + 1)
    f = {q: zero[:] for q in system.variables}
    for _ in range(horizon + 2):
        new = {}
        for q in system.variables:
            acc = zero[:]
            if q == system.seed and horizon >= 1:
                acc[1] = 1
            for t in system.equations[q]:
                prod = f[t.cells[0]]
                for cell in t.cells[1:]:
                    prod = _convolve(prod, f[cell], horizon)
                acc = [a + b for a, b in zip(acc, prod)]
            new[q] = acc
        if new == f:
            return {q: Series(tuple(v)) for q, v in f.items()}
        f = new
    raise ArithmeticError("fixed-point iteration did not stabilise")


def class_series(system: AlgebraicSystem, basis: Iterable[Sequence[int]], horizon: int) -> Series:
    """Series of the members avoiding every pattern of basis: the total over
    all property sets containing those avoidance properties."""
    need = system.family.mask(Property(AV, Perm(b)) for b in basis)
    sols = solve_series(system, horizon)
    total = Series(tuple([0] * (horizon + 1)))
    for q, s in sols.items():
        if q & need == need:
            total = total + s
    return total


def inclusion_exclusion(fam: PropertyFamily, at_least: dict[PropertySet, RationalGF], q: PropertySet) -> RationalGF:
    """GF of exactly property set q from the GFs of 'at least R' for every R containing q."""
    free = [i for i in range(len(fam)) if not q >> i & 1]
    total = RationalGF(0)
    for k in range(len(free) + 1):
        for extra in combinations(free, k):
            r = q | sum(1 << i for i in extra)
            if r not in at_least:
                raise KeyError(f"missing the GF for {fam.describe(r)}")
            total = total + at_least[r] * (-1) ** k
    return total

