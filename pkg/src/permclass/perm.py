"""Permutations in one-line notation and their substitution structure.

Positions and values are 1-based throughout the public API, matching the
usual combinatorial conventions (intervals are written ``(a, b)`` meaning the
index range a..b inclusive).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class Perm(tuple):
    """An immutable permutation of 1..n stored as its one-line notation."""

    __slots__ = ()

    def __new__(cls, entries: Iterable[int] = ()):
        entries = tuple(int(v) for v in entries)
        if sorted(entries) != list(range(1, len(entries) + 1)):
            raise ValueError(f"not a permutation of 1..{len(entries)}: {entries}")
        return super().__new__(cls, entries)

    @classmethod
    def _trusted(cls, entries) -> "Perm":
        return tuple.__new__(cls, entries)

    @classmethod
    def parse(cls, text: str) -> "Perm":
        """Read ``"2 3 5 1"`` or the compact ``"2351"`` (only when every value is a digit)."""
        text = text.strip()
        if not text:
            return cls(())
        if re.fullmatch(r"[1-9]+", text):
            return cls(int(c) for c in text)
        tokens = re.split(r"[\s,]+", text)
        if not all(t.isdigit() for t in tokens):
            raise ValueError(f"malformed permutation: {text!r}")
        return cls(int(t) for t in tokens)

    @classmethod
    def standardize(cls, values: Sequence) -> "Perm":
        """The permutation order isomorphic to a sequence of distinct values."""
        order = sorted(range(len(values)), key=values.__getitem__)
        out = [0] * len(values)
        for rank, idx in enumerate(order, 1):
            out[idx] = rank
        return cls._trusted(out)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls._trusted(range(1, n + 1))

    def __str__(self) -> str:
        if len(self) <= 9:
            return "".join(map(str, self))
        return self.to_text()

    def __repr__(self) -> str:
        return f"Perm({str(self)!r})"

    def to_text(self) -> str:
        return " ".join(map(str, self))

    def inverse(self) -> "Perm":
        out = [0] * len(self)
        for i, v in enumerate(self, 1):
            out[v - 1] = i
        return Perm._trusted(out)

    def reverse(self) -> "Perm":
        return Perm._trusted(self[::-1])

    def complement(self) -> "Perm":
        n = len(self) + 1
        return Perm._trusted(n - v for v in self)

    def pattern(self, positions: Iterable[int]) -> "Perm":
        """Subpermutation at the given 1-based positions."""
        return Perm.standardize([self[p - 1] for p in positions])

    def delete(self, position: int) -> "Perm":
        """Remove the entry at a 1-based position."""
        return Perm.standardize(self[: position - 1] + self[position:])


def symmetries(pi: Perm) -> list[Perm]:
    """All eight images of ``pi`` under the dihedral group of the square."""
    out = []
    for p in (pi, pi.inverse()):
        for q in (p, p.reverse()):
            out.append(q)
            out.append(q.complement())
    return out


def all_perms(n: int) -> Iterator[Perm]:
    for p in itertools.permutations(range(1, n + 1)):
        yield Perm._trusted(p)


# --- containment -----------------------------------------------------------


def embeddings(pi: Sequence[int], sigma: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield every occurrence of ``sigma`` in ``pi`` as a tuple of 1-based positions.

    Entries of sigma are placed left to right; a candidate value must sit
    strictly between the images of the nearest smaller and nearest larger
    entries already placed, which prunes most of the search.
    """
    n, k = len(pi), len(sigma)
    if k == 0:
        yield ()
        return
    if k > n:
        return
    # for each j, the earlier indices holding the next smaller / next larger value
    below, above = [], []
    for j in range(k):
        lo = hi = None
        for i in range(j):
            if sigma[i] < sigma[j] and (lo is None or sigma[i] > sigma[lo]):
                lo = i
            if sigma[i] > sigma[j] and (hi is None or sigma[i] < sigma[hi]):
                hi = i
        below.append(lo)
        above.append(hi)

    chosen = [0] * k

    def extend(j: int, start: int):
        lo, hi = below[j], above[j]
        lo_v = pi[chosen[lo]] if lo is not None else 0
        hi_v = pi[chosen[hi]] if hi is not None else n + 1
        for pos in range(start, n - (k - j) + 1):
            v = pi[pos]
            if lo_v < v < hi_v:
                chosen[j] = pos
                if j + 1 == k:
                    yield tuple(c + 1 for c in chosen)
                else:
                    yield from extend(j + 1, pos + 1)

    yield from extend(0, 0)


def contains(pi: Sequence[int], sigma: Sequence[int]) -> bool:
    """True iff ``pi`` has a subsequence order isomorphic to ``sigma``."""
    if len(sigma) > len(pi):
        return False
    return next(embeddings(pi, sigma), None) is not None


def avoids(pi: Sequence[int], basis: Iterable[Sequence[int]]) -> bool:
    return not any(contains(pi, b) for b in basis)


def patterns(pi: Perm, k: int | None = None) -> set[Perm]:
    """All distinct subpermutations of ``pi`` (of length ``k`` if given, else all nonempty)."""
    n = len(pi)
    lengths = [k] if k is not None else range(1, n + 1)
    out = set()
    for m in lengths:
        for pos in itertools.combinations(range(1, n + 1), m):
            out.add(pi.pattern(pos))
    return out


# --- intervals and simplicity ----------------------------------------------


def is_interval(pi: Sequence[int], a: int, b: int) -> bool:
    window = pi[a - 1 : b]
    return max(window) - min(window) == b - a


def proper_intervals(pi: Sequence[int]) -> set[tuple[int, int]]:
    """Index ranges (a, b), 1 < b-a+1 < n, whose values are contiguous."""
    n = len(pi)
    out = set()
    for a in range(n):
        lo = hi = pi[a]
        for b in range(a + 1, n):
            lo = min(lo, pi[b])
            hi = max(hi, pi[b])
            if b - a + 1 < n and hi - lo == b - a:
                out.add((a + 1, b + 1))
    return out


def is_simple(pi: Sequence[int]) -> bool:
    n = len(pi)
    if n < 2:
        return False
    for a in range(n):
        lo = hi = pi[a]
        for b in range(a + 1, n):
            lo = min(lo, pi[b])
            hi = max(hi, pi[b])
            if hi - lo == b - a and b - a + 1 < n:
                return False
    return True


@lru_cache(maxsize=None)
def simples(n: int) -> tuple[Perm, ...]:
    """Simple permutations of length ``n``, sorted.

    Built from the simples one shorter by one-point extension, plus the simple
    parallel alternations (the only simples lacking a simple one-point
    deletion).
    """
    if n < 2:
        return ()
    if n <= 4:
        return tuple(p for p in all_perms(n) if is_simple(p))
    found = set()
    for s in simples(n - 1):
        for q in one_point_extensions(s):
            if is_simple(q):
                found.add(q)
    found.update(p for p in parallel_alternations(n) if is_simple(p))
    return tuple(sorted(found))


# --- sums, skew sums, inflation --------------------------------------------


def direct_sum(*perms: Sequence[int]) -> Perm:
    out: list[int] = []
    for p in perms:
        shift = len(out)
        out.extend(v + shift for v in p)
    return Perm._trusted(out)


def skew_sum(*perms: Sequence[int]) -> Perm:
    total = sum(len(p) for p in perms)
    out: list[int] = []
    for p in perms:
        total -= len(p)
        out.extend(v + total for v in p)
    return Perm._trusted(out)


def inflate(sigma: Sequence[int], blocks: Sequence[Sequence[int]]) -> Perm:
    """The inflation sigma[blocks[0], ..., blocks[m-1]]."""
    if len(blocks) != len(sigma):
        raise ValueError(f"{len(sigma)} skeleton entries but {len(blocks)} blocks")
    if any(len(b) == 0 for b in blocks):
        raise ValueError("inflation blocks must be nonempty")
    # value offset of block i = total size of blocks whose skeleton value is smaller
    sizes_by_value = [0] * (len(sigma) + 1)
    for v, b in zip(sigma, blocks):
        sizes_by_value[v] = len(b)
    offset = list(itertools.accumulate(sizes_by_value))
    out: list[int] = []
    for v, b in zip(sigma, blocks):
        out.extend(offset[v - 1] + x for x in b)
    return Perm._trusted(out)


def _sum_cuts(pi: Sequence[int]) -> list[int]:
    """Positions p (1..n-1) such that pi[:p] is exactly {1..p}."""
    cuts, hi = [], 0
    for i, v in enumerate(pi[:-1], 1):
        hi = max(hi, v)
        if hi == i:
            cuts.append(i)
    return cuts


def _skew_cuts(pi: Sequence[int]) -> list[int]:
    n = len(pi)
    cuts, lo = [], n + 1
    for i, v in enumerate(pi[:-1], 1):
        lo = min(lo, v)
        if lo == n - i + 1:
            cuts.append(i)
    return cuts


def _split(pi: Sequence[int], cuts: list[int]) -> list[Perm]:
    bounds = [0, *cuts, len(pi)]
    return [Perm.standardize(pi[a:b]) for a, b in zip(bounds, bounds[1:])]


def sum_components(pi: Sequence[int]) -> list[Perm]:
    return _split(pi, _sum_cuts(pi))


def skew_components(pi: Sequence[int]) -> list[Perm]:
    return _split(pi, _skew_cuts(pi))


def is_sum_decomposable(pi: Sequence[int]) -> bool:
    return len(pi) > 1 and bool(_sum_cuts(pi))


def is_skew_decomposable(pi: Sequence[int]) -> bool:
    return len(pi) > 1 and bool(_skew_cuts(pi))


def first_component(pi: Sequence[int]) -> Perm:
    """First sum component, first skew component, or ``pi`` itself."""
    if is_sum_decomposable(pi):
        return sum_components(pi)[0]
    if is_skew_decomposable(pi):
        return skew_components(pi)[0]
    return Perm.standardize(pi)


@dataclass(frozen=True)
class Decomposition:
    skeleton: Perm
    blocks: tuple[Perm, ...]

    def inflate(self) -> Perm:
        return inflate(self.skeleton, self.blocks)

    def __str__(self) -> str:
        return f"{self.skeleton}[{','.join(str(b) for b in self.blocks)}]"


def substitution_decompose(pi: Sequence[int]) -> Decomposition:
    """Write ``pi`` as an inflation of its unique simple skeleton.

    For sum (skew) decomposable input the skeleton is 12 (21) and the first
    block is the first sum (skew) component.
    """
    pi = Perm.standardize(pi)
    n = len(pi)
    if n < 2:
        raise ValueError("substitution decomposition needs length >= 2")
    cuts = _sum_cuts(pi)
    if cuts:
        head, tail = Perm.standardize(pi[: cuts[0]]), Perm.standardize(pi[cuts[0] :])
        return Decomposition(Perm._trusted((1, 2)), (head, tail))
    cuts = _skew_cuts(pi)
    if cuts:
        head, tail = Perm.standardize(pi[: cuts[0]]), Perm.standardize(pi[cuts[0] :])
        return Decomposition(Perm._trusted((2, 1)), (head, tail))
    # neither decomposable: the maximal proper intervals are disjoint and tile pi
    maximal = []
    a = 0
    while a < n:
        best = a
        lo = hi = pi[a]
        for b in range(a + 1, n):
            lo, hi = min(lo, pi[b]), max(hi, pi[b])
            if hi - lo == b - a and b - a + 1 < n:
                best = b
        maximal.append((a, best))
        a = best + 1
    blocks = tuple(Perm.standardize(pi[a : b + 1]) for a, b in maximal)
    skeleton = Perm.standardize([pi[a] for a, _ in maximal])
    return Decomposition(skeleton, blocks)


# --- one-point extensions and special families -----------------------------


def one_point_extensions(pi: Sequence[int]) -> set[Perm]:
    """Permutations one longer than ``pi`` with a one-entry deletion equal to ``pi``."""
    n = len(pi)
    out = set()
    for slot in range(n + 1):
        for value in range(1, n + 2):
            shifted = [v + 1 if v >= value else v for v in pi]
            out.add(Perm._trusted(shifted[:slot] + [value] + shifted[slot:]))
    return out


def _separated(values: Sequence[int], others: Sequence[int]) -> bool:
    """Every pair of consecutive ``values`` (sorted) has an ``others`` value between."""
    vs = sorted(values)
    os_ = sorted(others)
    j = 0
    for a, b in zip(vs, vs[1:]):
        while j < len(os_) and os_[j] < a:
            j += 1
        if not (j < len(os_) and os_[j] < b):
            return False
    return True


def _is_canonical_alternation(pi: Sequence[int]) -> bool:
    # vertical split, both halves increasing, each half's points separated by the other's
    n = len(pi)
    for k in range(1, n):
        left, right = pi[:k], pi[k:]
        if all(a < b for a, b in zip(left, left[1:])) and all(a < b for a, b in zip(right, right[1:])):
            if _separated(left, right) and _separated(right, left):
                return True
    return False


def is_parallel_alternation(pi: Perm) -> bool:
    """Whether ``pi`` is a parallel alternation in any of its orientations."""
    if len(pi) < 2:
        return False
    return any(_is_canonical_alternation(q) for q in symmetries(Perm(pi)))


@lru_cache(maxsize=None)
def parallel_alternations(n: int) -> tuple[Perm, ...]:
    """Simple parallel alternations of length ``n``, sorted lexicographically."""
    if n < 4 or n % 2:
        return ()
    # evens then odds (2 4 6 ... 1 3 5 ...) is simple; its symmetries give the rest
    base = Perm(list(range(2, n + 1, 2)) + list(range(1, n + 1, 2)))
    return tuple(sorted(set(symmetries(base))))


def parallel_alternation_census(n: int) -> tuple[int, list[Perm]]:
    """Count and list the simple parallel alternations of length ``n``.

    Works from the definition: every split point and every choice of values
    for the left half is tried in the canonical orientation, then all
    symmetries are taken and the simple ones kept.
    """
    found: set[Perm] = set()
    values = range(1, n + 1)
    for k in range(1, n):
        for left in itertools.combinations(values, k):
            right = sorted(set(values) - set(left))
            if _separated(left, right) and _separated(right, left):
                found.update(q for q in symmetries(Perm(list(left) + right)) if is_simple(q))
    return len(found), sorted(found)


def _oscillation_seed(n: int) -> list[int]:
    # 2, 4, 1, 6, 3, 8, 5, ... : the oscillating sequence with a leading 2
    return [2 if i == 1 else (i + 2 if i % 2 == 0 else i - 2) for i in range(1, n + 1)]


def increasing_oscillation(n: int) -> Perm:
    """The increasing oscillation of length ``n`` beginning 2 4 1 6 3 ... (for n >= 3)."""
    if n < 1:
        raise ValueError("oscillations have length >= 1")
    if n == 1:
        return Perm((1,))
    if n % 2:
        return Perm.standardize(_oscillation_seed(n))
    seq = _oscillation_seed(n + 1)
    del seq[-2]
    return Perm.standardize(seq)


def increasing_oscillations(n: int) -> list[Perm]:
    p = increasing_oscillation(n)
    return sorted({p, p.inverse()})


def oscillations(n: int) -> list[Perm]:
    """All increasing and decreasing oscillations of length ``n``."""
    inc = increasing_oscillations(n)
    return sorted(set(inc) | {p.reverse() for p in inc})


def oscillation_census(n: int) -> int:
    return len(oscillations(n))


def antichain_element(k: int) -> Perm:
    """k-th member of the increasing oscillating antichain (length 2k+3)."""
    if k < 1:
        raise ValueError("antichain index starts at 1")
    osc = increasing_oscillation(2 * k + 1)
    top = osc.index(len(osc))
    blocks = [Perm((1,))] * len(osc)
    blocks[0] = blocks[top] = Perm((1, 2))
    return inflate(osc, blocks)
