"""Property families, property profiles and frameworks.

A property is one of: sum decomposable (``D+``), skew decomposable
(``D-``), avoiding a pattern (``Av(d)``), or having a first component that
avoids a pattern (``Av#1(d)``).  A :class:`PropertyFamily` orders a finite
set of properties so that a set of them is an ``int`` bitmask.

A framework ``sigma[Q_1, ..., Q_m]`` stands for every inflation of
``sigma`` whose i-th block has exactly the properties ``Q_i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .perm import (
    Perm,
    all_perms,
    contains,
    embeddings,
    first_component,
    inflate,
    is_simple,
    is_skew_decomposable,
    is_sum_decomposable,
    patterns,
    skew_components,
    substitution_decompose,
    sum_components,
)

PropertySet = int

SUM, SKEW, AV, AV1 = "D+", "D-", "Av", "Av#1"


class IndeterminateFramework(ValueError):
    """A cell's property set has no witness in the catalogue."""


@dataclass(frozen=True, order=True)
class Property:
    kind: str
    pattern: Perm = Perm()

    def holds(self, pi: Sequence[int]) -> bool:
        if self.kind == SUM:
            return is_sum_decomposable(pi)
        if self.kind == SKEW:
            return is_skew_decomposable(pi)
        if self.kind == AV:
            return not contains(pi, self.pattern)
        return not contains(first_component(pi), self.pattern)

    def __str__(self) -> str:
        if self.kind in (SUM, SKEW):
            return self.kind
        return f"{self.kind}({self.pattern})"


def _sort_key(p: Property):
    rank = {SUM: 0, SKEW: 1, AV: 2, AV1: 3}[p.kind]
    return (rank, len(p.pattern), p.pattern)


class PropertyFamily:
    """An ordered, duplicate-free tuple of properties."""

    def __init__(self, props: Iterable[Property]):
        self.props: tuple[Property, ...] = tuple(sorted(set(props), key=_sort_key))
        self.index = {p: i for i, p in enumerate(self.props)}

    def __len__(self) -> int:
        return len(self.props)

    def __iter__(self):
        return iter(self.props)

    def __contains__(self, p) -> bool:
        return p in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, PropertyFamily) and self.props == other.props

    def __hash__(self) -> int:
        return hash(self.props)

    def __repr__(self) -> str:
        return "PropertyFamily(" + ", ".join(map(str, self.props)) + ")"

    def bit(self, p: Property) -> int:
        return 1 << self.index[p]

    def has(self, mask: PropertySet, p: Property) -> bool:
        i = self.index.get(p)
        return i is not None and bool(mask >> i & 1)

    def mask(self, props: Iterable[Property]) -> PropertySet:
        return sum(self.bit(p) for p in set(props))

    def members(self, mask: PropertySet) -> list[Property]:
        return [p for i, p in enumerate(self.props) if mask >> i & 1]

    def describe(self, mask: PropertySet) -> str:
        return "{" + ", ".join(map(str, self.members(mask))) + "}"

    @property
    def full(self) -> PropertySet:
        return (1 << len(self.props)) - 1

    def avoidance_patterns(self) -> list[Perm]:
        return [p.pattern for p in self.props if p.kind == AV]

    def extended(self, patterns_: Iterable[Sequence[int]]) -> "PropertyFamily":
        """This family plus ``Av`` of the given patterns."""
        return PropertyFamily(self.props + tuple(Property(AV, Perm(d)) for d in patterns_))


def _downset(basis: Iterable[Sequence[int]]) -> set[Perm]:
    out: set[Perm] = set()
    for b in basis:
        out |= patterns(Perm(b))
    return out


def family_pb(basis: Iterable[Sequence[int]]) -> PropertyFamily:
    """D+, D- and Av(d) for every nonempty pattern d of a basis element."""
    return PropertyFamily([Property(SUM), Property(SKEW)] + [Property(AV, d) for d in _downset(basis)])


def family_extended(basis: Iterable[Sequence[int]]) -> PropertyFamily:
    """family_pb together with the first-component properties Av#1(d)."""
    ds = _downset(basis)
    return PropertyFamily([Property(SUM), Property(SKEW)] + [Property(k, d) for d in ds for k in (AV, AV1)])


def property_profile(pi: Sequence[int], fam: PropertyFamily) -> PropertySet:
    mask = 0
    for i, p in enumerate(fam.props):
        if p.holds(pi):
            mask |= 1 << i
    return mask


def singleton_profile(fam: PropertyFamily) -> PropertySet:
    """The profile of the permutation 1: every avoidance property except Av(1)."""
    return property_profile(Perm((1,)), fam)


# --- combination rules ------------------------------------------------------------


@lru_cache(maxsize=None)
def interval_partitions(delta: Perm) -> tuple[tuple[Perm, tuple[Perm, ...]], ...]:
    """Every way of writing delta = tau[gamma_1, ..., gamma_r] with consecutive blocks."""
    n = len(delta)
    out = []

    def rec(start: int, cuts: list[int]):
        if start == n:
            bounds = list(zip([0] + cuts[:-1], cuts))
            reps = [delta[a] for a, _ in bounds]
            tau = Perm.standardize(reps)
            gammas = tuple(Perm.standardize(delta[a:b]) for a, b in bounds)
            out.append((tau, gammas))
            return
        lo = hi = delta[start]
        for end in range(start + 1, n + 1):
            lo = min(lo, delta[end - 1])
            hi = max(hi, delta[end - 1])
            if hi - lo == end - start - 1:
                rec(end, cuts + [end])

    rec(0, [])
    return tuple(out)


def _block_contains(gamma: Perm, cell: PropertySet, fam: PropertyFamily) -> bool:
    if len(gamma) == 1:
        return True
    prop = Property(AV, gamma)
    if prop not in fam:
        raise KeyError(f"family lacks {prop}, needed to decide containment")
    return not fam.has(cell, prop)


def framework_contains(sigma: Sequence[int], cells: Sequence[PropertySet], delta: Perm, fam: PropertyFamily) -> bool:
    """Whether the inflations described by sigma[cells] contain delta.

    An occurrence of delta splits into the pieces landing in each block;
    these pieces are intervals of delta, so delta = tau[gamma...] with tau
    occurring in sigma and each gamma contained in its block.
    """
    for tau, gammas in interval_partitions(Perm(delta)):
        if len(tau) > len(sigma):
            continue
        for emb in embeddings(sigma, tau):
            if all(_block_contains(g, cells[i - 1], fam) for g, i in zip(gammas, emb)):
                return True
    return False


def _first_component_cells(sigma: Perm, cells: Sequence[PropertySet], fam: PropertyFamily):
    """Locate the first component of an inflation of sigma.

    Returns ("frame", tau, cells) when it is tau[cells] for a prefix of the
    blocks, ("block", cell) when it is block 1 itself, or ("head", cell)
    when it is the first component of block 1.
    """
    if len(sigma) == 1:
        return ("head", cells[0])
    if is_sum_decomposable(sigma):
        tau, flag = sum_components(sigma)[0], Property(SUM)
    elif is_skew_decomposable(sigma):
        tau, flag = skew_components(sigma)[0], Property(SKEW)
    else:
        return ("frame", sigma, tuple(cells))
    if len(tau) > 1:
        return ("frame", tau, tuple(cells[: len(tau)]))
    # the first block sits alone: its own first component leads if it splits the same way
    return ("head", cells[0]) if fam.has(cells[0], flag) else ("block", cells[0])


def framework_mask(sigma: Sequence[int], cells: Sequence[PropertySet], fam: PropertyFamily) -> PropertySet:
    """The property set shared by every permutation described by sigma[cells].

    No realizability check; see :func:`framework_properties`.
    """
    sigma = Perm(sigma)
    if len(sigma) != len(cells):
        raise ValueError("one cell per skeleton entry required")
    if len(sigma) == 1:
        return cells[0]
    mask = 0
    av_cache: dict[Perm, bool] = {}

    def avoids(frame_sigma, frame_cells, delta) -> bool:
        if frame_sigma == sigma:
            if delta not in av_cache:
                av_cache[delta] = not framework_contains(sigma, cells, delta, fam)
            return av_cache[delta]
        return not framework_contains(frame_sigma, frame_cells, delta, fam)

    head = None
    for i, p in enumerate(fam.props):
        if p.kind == SUM:
            ok = is_sum_decomposable(sigma)
        elif p.kind == SKEW:
            ok = is_skew_decomposable(sigma)
        elif p.kind == AV:
            ok = avoids(sigma, cells, p.pattern)
        else:
            if head is None:
                head = _first_component_cells(sigma, cells, fam)
            if head[0] == "frame":
                ok = avoids(head[1], head[2], p.pattern)
            elif head[0] == "head":
                ok = fam.has(head[1], p)
            else:
                ok = fam.has(head[1], Property(AV, p.pattern))
        if ok:
            mask |= 1 << i
    return mask


# --- witnesses --------------------------------------------------------------------


class Catalogue:
    """Smallest witnesses of each property set, discovered lazily by length."""

    def __init__(self, fam: PropertyFamily, max_len: int = 8):
        self.fam = fam
        self.max_len = max_len
        self.witness: dict[PropertySet, Perm] = {}
        self.scanned = 0

    def _scan_next(self) -> None:
        self.scanned += 1
        for p in all_perms(self.scanned):
            self.witness.setdefault(property_profile(p, self.fam), p)

    def find(self, mask: PropertySet) -> Perm | None:
        while mask not in self.witness and self.scanned < self.max_len:
            self._scan_next()
        return self.witness.get(mask)

    def realized(self) -> dict[PropertySet, Perm]:
        while self.scanned < self.max_len:
            self._scan_next()
        return dict(self.witness)


_catalogues: dict[tuple[PropertyFamily, int], Catalogue] = {}


def catalogue(fam: PropertyFamily, max_len: int = 8) -> Catalogue:
    key = (fam, max_len)
    if key not in _catalogues:
        _catalogues[key] = Catalogue(fam, max_len)
    return _catalogues[key]


def witness(mask: PropertySet, fam: PropertyFamily, max_len: int = 8) -> Perm:
    w = catalogue(fam, max_len).find(mask)
    if w is None:
        raise IndeterminateFramework(f"no permutation of length <= {max_len} has properties {fam.describe(mask)}")
    return w


# --- frameworks ---------------------------------------------------------------------


@dataclass(frozen=True)
class Framework:
    skeleton: Perm
    cells: tuple[PropertySet, ...]

    def __post_init__(self):
        object.__setattr__(self, "skeleton", Perm(self.skeleton))
        object.__setattr__(self, "cells", tuple(self.cells))
        if len(self.skeleton) != len(self.cells):
            raise ValueError("one cell per skeleton entry required")

    def is_simple(self, fam: PropertyFamily) -> bool:
        s = self.skeleton
        if not is_simple(s):
            return False
        if s == (1, 2) and fam.has(self.cells[0], Property(SUM)):
            return False
        if s == (2, 1) and fam.has(self.cells[0], Property(SKEW)):
            return False
        return True

    def render(self, fam: PropertyFamily) -> str:
        return f"{self.skeleton}[" + ", ".join(fam.describe(c) for c in self.cells) + "]"


def framework_properties(f: Framework, fam: PropertyFamily, max_len: int = 8) -> PropertySet:
    """Properties of every permutation described by ``f``, after checking each cell has a witness."""
    for c in f.cells:
        witness(c, fam, max_len)
    return framework_mask(f.skeleton, f.cells, fam)


def simple_framework_of(pi: Sequence[int], fam: PropertyFamily) -> Framework:
    d = substitution_decompose(pi)
    return Framework(d.skeleton, tuple(property_profile(b, fam) for b in d.blocks))


def describes(f: Framework, pi: Sequence[int], fam: PropertyFamily) -> bool:
    """Whether ``pi`` is an inflation of the skeleton with blocks of exactly the cell properties."""
    return any(
        all(property_profile(b, fam) == c for b, c in zip(blocks, f.cells))
        for blocks in _block_splits(Perm(pi), f.skeleton)
    )


def _block_splits(pi: Perm, sigma: Perm) -> Iterator[list[Perm]]:
    """Every way of reading pi as an inflation of sigma, as the block list."""
    n, m = len(pi), len(sigma)
    for cuts in itertools.combinations(range(1, n), m - 1):
        bounds = list(zip((0,) + cuts, cuts + (n,)))
        windows = [pi[a:b] for a, b in bounds]
        if any(max(w) - min(w) != len(w) - 1 for w in windows):
            continue
        if Perm.standardize([w[0] for w in windows]) == sigma:
            yield [Perm.standardize(w) for w in windows]


def witness_inflation(f: Framework, fam: PropertyFamily, max_len: int = 8) -> Perm:
    return inflate(f.skeleton, [witness(c, fam, max_len) for c in f.cells])
