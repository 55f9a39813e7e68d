"""Permutation classes as expression trees, with membership and enumeration.

Leaves are ``Avoid`` (a finite basis), ``GeomClass`` (a geometric grid class)
and ``ExplicitDownset`` (everything contained in finitely many generators).
Nodes combine classes by intersection, union, substitution closure and
inflation.  Every node keeps its result downward closed, so enumeration
can grow members one new maximum at a time.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .grid import GridMatrix, geom_member, load_matrix
from .perm import (
    Decomposition,
    Perm,
    all_perms,
    contains,
    inflate,
    is_parallel_alternation,
    is_simple,
    oscillations,
    simples,
    skew_components,
    skew_sum,
    direct_sum,
    substitution_decompose,
    sum_components,
)
from .properties import (
    AV,
    Framework,
    Property,
    PropertyFamily,
    framework_mask,
    witness,
)

ENUMERATION_CAP = 16
NAIVE_CAP = 10


class ResourceLimit(ValueError):
    def __init__(self, message: str, length: int):
        super().__init__(message)
        self.length = length


class ClassSpec:
    """Base of the class expression tree."""

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


def _perm_text(p: Perm) -> str:
    return str(p) if len(p) <= 9 else "[" + p.to_text() + "]"


@dataclass(frozen=True)
class Avoid(ClassSpec):
    """Av(basis); the empty basis gives every permutation."""

    basis: tuple[Perm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(sorted({Perm(b) for b in self.basis}, key=lambda p: (len(p), p))))

    def to_text(self) -> str:
        return "avoid(" + ",".join(map(_perm_text, self.basis)) + ")"


@dataclass(frozen=True)
class GeomClass(ClassSpec):
    matrix: GridMatrix
    source: str = field(default="", compare=False)

    def to_text(self) -> str:
        return f"geom({self.source or self.matrix.to_text().strip().replace(chr(10), '/')})"


@dataclass(frozen=True)
class ExplicitDownset(ClassSpec):
    generators: tuple[Perm, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(sorted({Perm(g) for g in self.generators}, key=lambda p: (len(p), p))))

    def to_text(self) -> str:
        return "downset(" + ",".join(map(_perm_text, self.generators)) + ")"


@dataclass(frozen=True)
class Intersection(ClassSpec):
    parts: tuple[ClassSpec, ...]

    def to_text(self) -> str:
        return "intersect(" + ",".join(p.to_text() for p in self.parts) + ")"


@dataclass(frozen=True)
class Union(ClassSpec):
    parts: tuple[ClassSpec, ...]

    def to_text(self) -> str:
        return "union(" + ",".join(p.to_text() for p in self.parts) + ")"


@dataclass(frozen=True)
class SubstClosure(ClassSpec):
    inner: ClassSpec

    def to_text(self) -> str:
        return f"closure({self.inner.to_text()})"


@dataclass(frozen=True)
class Inflation(ClassSpec):
    """outer[inner]: inflations of members of outer by members of inner."""

    outer: ClassSpec
    inner: ClassSpec

    def to_text(self) -> str:
        return f"inflate({self.outer.to_text()},{self.inner.to_text()})"


@dataclass(frozen=True)
class IteratedInflation(ClassSpec):
    """C^[d]: {1} for d = 0, then C[C^[d-1]]."""

    inner: ClassSpec
    depth: int

    def to_text(self) -> str:
        return f"iterate({self.inner.to_text()},{self.depth})"


ALL = Avoid(())


def oscillation_class(k: int) -> ClassSpec:
    """Oscillations of length at most k together with the monotone classes."""
    gens = [p for n in range(1, k + 1) for p in oscillations(n)]
    return Union((ExplicitDownset(tuple(gens)), Avoid((Perm((2, 1)),)), Avoid((Perm((1, 2)),))))


# --- membership -------------------------------------------------------------------


def member(spec: ClassSpec, pi: Sequence[int]) -> bool:
    return _member(spec, Perm(pi))


@lru_cache(maxsize=1 << 20)
def _member(spec: ClassSpec, pi: Perm) -> bool:
    if isinstance(spec, Avoid):
        return not any(contains(pi, b) for b in spec.basis)
    if isinstance(spec, ExplicitDownset):
        return any(contains(g, pi) for g in spec.generators)
    if isinstance(spec, GeomClass):
        return geom_member(spec.matrix, pi)
    if isinstance(spec, Intersection):
        return all(_member(p, pi) for p in spec.parts)
    if isinstance(spec, Union):
        return any(_member(p, pi) for p in spec.parts)
    if len(pi) == 0:
        return True
    if isinstance(spec, SubstClosure):
        # the skeleton is simple (or 1), so it lies in the closure only if it lies in the class
        if len(pi) == 1:
            return _member(spec.inner, pi)
        d = substitution_decompose(pi)
        return _member(spec.inner, d.skeleton) and all(_member(spec, b) for b in d.blocks)
    if isinstance(spec, Inflation):
        if not _member(spec.inner, Perm((1,))):
            return False
        return _member(spec.outer, u_profile(pi, spec.inner))
    if isinstance(spec, IteratedInflation):
        if spec.depth == 0:
            return len(pi) == 1
        return _member(Inflation(spec.inner, IteratedInflation(spec.inner, spec.depth - 1)), pi)
    raise TypeError(f"unknown class node {spec!r}")


# --- enumeration ----------------------------------------------------------------------


def _children(pi: Perm) -> Iterator[Perm]:
    top = len(pi) + 1
    for slot in range(top):
        yield Perm._trusted(pi[:slot] + (top,) + pi[slot:])


def levels(spec: ClassSpec, n_max: int, cap: int = ENUMERATION_CAP) -> Iterator[list[Perm]]:
    """Members of lengths 1..n_max, grown by inserting a new maximum.

    Deleting the maximum of a member gives a member, so every member is
    reached exactly once from its parent.
    """
    if n_max > cap:
        raise ResourceLimit(f"length {n_max} exceeds the enumeration cap {cap}", cap + 1)
    level = [Perm((1,))] if member(spec, (1,)) else []
    for n in range(1, n_max + 1):
        yield level
        if n < n_max:
            level = [c for p in level for c in _children(p) if member(spec, c)]


def enumerate_class(spec: ClassSpec, n_max: int, cap: int = ENUMERATION_CAP) -> list[int]:
    """Counts of members of lengths 1..n_max."""
    return [len(level) for level in levels(spec, n_max, cap)]


def class_members(spec: ClassSpec, n: int, cap: int = ENUMERATION_CAP) -> list[Perm]:
    out: list[Perm] = []
    for out in levels(spec, n, cap):
        pass
    return sorted(out)


def naive_counts(spec: ClassSpec, n_max: int, cap: int = NAIVE_CAP) -> list[int]:
    """Counts by testing every permutation; the cross-check for enumerate_class."""
    if n_max > cap:
        raise ResourceLimit(f"length {n_max} exceeds the brute-force cap {cap}", cap + 1)
    return [sum(1 for p in all_perms(n) if member(spec, p)) for n in range(1, n_max + 1)]


# --- U-decompositions ----------------------------------------------------------------


def _interval_blocks(pi: Perm, start: int) -> Iterator[int]:
    """Ends (exclusive) of the blocks starting at ``start`` whose values form an interval."""
    lo = hi = pi[start]
    for end in range(start + 1, len(pi) + 1):
        lo = min(lo, pi[end - 1])
        hi = max(hi, pi[end - 1])
        if hi - lo == end - start - 1:
            yield end


def _decomposition(pi: Perm, cuts: Sequence[int]) -> Decomposition:
    bounds = list(zip((0,) + tuple(cuts[:-1]), cuts))
    skeleton = Perm.standardize([pi[a] for a, _ in bounds])
    return Decomposition(skeleton, tuple(Perm.standardize(pi[a:b]) for a, b in bounds))


def u_decompositions(pi: Sequence[int], u: ClassSpec) -> Iterator[Decomposition]:
    """Every expression of pi as an inflation with all blocks in u."""
    pi = Perm(pi)
    n = len(pi)

    def rec(start: int, cuts: list[int]):
        if start == n:
            yield _decomposition(pi, cuts)
            return
        for end in _interval_blocks(pi, start):
            if member(u, Perm.standardize(pi[start:end])):
                yield from rec(end, cuts + [end])

    yield from rec(0, [])


def _shortest_decompositions(pi: Perm, u: ClassSpec) -> list[Decomposition]:
    n = len(pi)
    inf = n + 1
    best = [inf] * (n + 1)
    best[n] = 0
    ok: dict[int, list[int]] = {}
    for start in range(n - 1, -1, -1):
        ok[start] = [e for e in _interval_blocks(pi, start) if member(u, Perm.standardize(pi[start:e]))]
        best[start] = min((1 + best[e] for e in ok[start]), default=inf)
    if best[0] >= inf:
        return []
    out = []

    def rec(start: int, cuts: list[int]):
        if start == n:
            out.append(_decomposition(pi, cuts))
            return
        for end in ok[start]:
            if 1 + best[end] == best[start]:
                rec(end, cuts + [end])

    rec(0, [])
    return out


def u_profile(pi: Sequence[int], u: ClassSpec) -> Perm:
    """The unique minimal skeleton over which pi is an inflation by members of u."""
    pi = Perm(pi)
    if not member(u, (1,)):
        raise ValueError("the inflating class must contain 1")
    skeletons = {d.skeleton for d in _shortest_decompositions(pi, u)}
    if len(skeletons) != 1:
        raise AssertionError(f"no unique minimal profile for {pi}: {sorted(skeletons)}")
    return skeletons.pop()


def left_greedy(pi: Sequence[int], u: ClassSpec) -> Decomposition:
    """The decomposition over the profile whose blocks, left to right, are as long as possible."""
    pi = Perm(pi)
    options = _shortest_decompositions(pi, u)
    return max(options, key=lambda d: tuple(len(b) for b in d.blocks))


def is_left_greedy(d: Decomposition, u: ClassSpec) -> bool:
    """False iff some interval of the skeleton admits a merge of its blocks.

    The merges: the whole stretch of blocks inflates to a member of u; or,
    for an adjacent ascent (descent), the block plus the first sum (skew)
    component of its right neighbour is a member of u.
    """
    blocks = d.blocks
    if not all(member(u, b) for b in blocks):
        raise ValueError("blocks outside the inflating class")
    theta = d.skeleton
    m = len(theta)
    for i in range(m):
        lo = hi = theta[i]
        for j in range(i + 1, m):
            lo, hi = min(lo, theta[j]), max(hi, theta[j])
            if hi - lo != j - i:
                continue
            tau = Perm.standardize(theta[i : j + 1])
            if member(u, inflate(tau, blocks[i : j + 1])):
                return False
            if j == i + 1:
                if tau == (1, 2) and member(u, direct_sum(blocks[i], sum_components(blocks[j])[0])):
                    return False
                if tau == (2, 1) and member(u, skew_sum(blocks[i], skew_components(blocks[j])[0])):
                    return False
    return True


# --- bases -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosureBasis:
    elements: tuple[Perm, ...]
    parallel_alternations: int
    max_len: int


def closure_basis(c: ClassSpec, max_len: int) -> ClosureBasis:
    """Minimal simple non-members of c up to max_len: the basis of its substitution closure.

    Nothing is claimed about lengths above max_len.
    """
    bad: list[Perm] = []
    for n in range(2, max_len + 1):
        for s in simples(n):
            if member(c, s):
                continue
            if not any(contains(s, b) for b in bad):
                bad.append(s)
    found = tuple(sorted(bad, key=lambda p: (len(p), p)))
    return ClosureBasis(found, sum(1 for b in found if is_parallel_alternation(b)), max_len)


def relative_basis(d: ClassSpec, ambient: ClassSpec, max_len: int) -> list[Perm]:
    """Minimal members of ambient outside d, up to max_len."""
    out = []
    for level in levels(ambient, max_len, cap=max(max_len, ENUMERATION_CAP)):
        for p in level:
            if not member(d, p) and all(member(d, p.delete(i)) for i in range(1, len(p) + 1)):
                out.append(p)
    return sorted(out, key=lambda p: (len(p), p))


# --- frameworks over an inflating class --------------------------------------------------


def _framework_in(tau: Perm, cells: Sequence[int], u: ClassSpec, fam: PropertyFamily) -> bool:
    """Whether the permutations described by tau[cells] lie in u."""
    if isinstance(u, Avoid) and all(Property(AV, b) in fam for b in u.basis):
        mask = framework_mask(tau, cells, fam)
        return all(fam.has(mask, Property(AV, b)) for b in u.basis)
    return member(u, inflate(tau, [witness(c, fam) for c in cells]))


def threatening_check(f: Framework, marked: Iterable[int], u: ClassSpec, fam: PropertyFamily) -> bool:
    """Whether marking the given skeleton entries (1-based) is threatening.

    Trivial markings (none, one, or all entries) always are.  Otherwise the
    marked entries must form an interval [i..j] of the skeleton, order
    isomorphic to tau, and either tau[Q_i..Q_j] describes members of u, or
    tau has length 2 and its blocks could trade a first component.
    """
    marked = sorted(set(marked))
    m = len(f.skeleton)
    if len(marked) <= 1 or len(marked) == m:
        return True
    i, j = marked[0], marked[-1]
    if marked != list(range(i, j + 1)):
        return False
    window = f.skeleton[i - 1 : j]
    if max(window) - min(window) != j - i:
        return False
    tau = Perm.standardize(window)
    cells = f.cells[i - 1 : j]
    if _framework_in(tau, cells, u, fam):
        return True
    if len(tau) == 2:
        left, right = witness(cells[0], fam), witness(cells[1], fam)
        if tau == (1, 2):
            return member(u, direct_sum(left, sum_components(right)[0]))
        return member(u, skew_sum(left, skew_components(right)[0]))
    return False


def framework_is_left_greedy(f: Framework, u: ClassSpec, fam: PropertyFamily) -> bool:
    """No threatening marking of two or more, but not all, entries."""
    m = len(f.skeleton)
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            if j - i + 1 < m and threatening_check(f, range(i, j + 1), u, fam):
                return False
    return True


# --- expression parser ---------------------------------------------------------------------


class SpecSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str):
        super().__init__(f"{message} at column {position + 1}: {text!r}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_]+)\s*\(|(?P<perm>\[[\d\s,]*\]|\d+)|(?P<sym>[(),])|(?P<bad>\S))")


class _Parser:
    def __init__(self, text: str, base_dir: str):
        self.text = text
        self.pos = 0
        self.base_dir = base_dir

    def error(self, msg: str, pos: int | None = None):
        raise SpecSyntaxError(msg, self.pos if pos is None else pos, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str):
        self.skip()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def perm(self) -> Perm:
        self.skip()
        start = self.pos
        m = re.compile(r"\[[\d\s,]*\]|\d+").match(self.text, self.pos)
        if not m:
            self.error("expected a permutation")
        self.pos = m.end()
        tok = m.group(0)
        try:
            return Perm.parse(tok.strip("[]")) if tok.startswith("[") else Perm(int(c) for c in tok)
        except ValueError as exc:
            self.error(str(exc), start)

    def perm_list(self) -> tuple[Perm, ...]:
        out = []
        if self.peek() == ")":
            return ()
        while True:
            out.append(self.perm())
            if self.peek() == ",":
                self.pos += 1
                continue
            return tuple(out)

    def spec_list(self) -> tuple[ClassSpec, ...]:
        out = [self.spec()]
        while self.peek() == ",":
            self.pos += 1
            out.append(self.spec())
        return tuple(out)

    def spec(self) -> ClassSpec:
        self.skip()
        start = self.pos
        m = re.compile(r"([A-Za-z_]+)\s*\(").match(self.text, self.pos)
        if not m:
            if self.text.startswith("all", self.pos):
                self.pos += 3
                return ALL
            self.error("expected a class expression")
        name = m.group(1)
        self.pos = m.end()
        if name == "avoid":
            node: ClassSpec = Avoid(self.perm_list())
        elif name == "downset":
            gens = self.perm_list()
            if not gens:
                self.error("downset needs at least one generator")
            node = ExplicitDownset(gens)
        elif name == "closure":
            node = SubstClosure(self.spec())
        elif name == "inflate":
            outer = self.spec()
            self.expect(",")
            node = Inflation(outer, self.spec())
        elif name == "iterate":
            inner = self.spec()
            self.expect(",")
            self.skip()
            dm = re.compile(r"\d+").match(self.text, self.pos)
            if not dm:
                self.error("expected a depth")
            self.pos = dm.end()
            node = IteratedInflation(inner, int(dm.group(0)))
        elif name in ("intersect", "union"):
            parts = self.spec_list()
            node = Intersection(parts) if name == "intersect" else Union(parts)
        elif name == "geom":
            end = self.text.find(")", self.pos)
            if end < 0:
                self.error("unterminated geom(")
            path = self.text[self.pos : end].strip()
            full = path if os.path.isabs(path) else os.path.join(self.base_dir, path)
            try:
                matrix = load_matrix(full)
            except OSError as exc:
                self.error(f"cannot read matrix file: {exc.strerror}", self.pos)
            except ValueError as exc:
                self.error(f"bad matrix file {path}: {exc}", self.pos)
            self.pos = end
            node = GeomClass(matrix, path)
        elif name == "oscillations":
            self.skip()
            dm = re.compile(r"\d+").match(self.text, self.pos)
            if not dm:
                self.error("expected a length")
            self.pos = dm.end()
            node = oscillation_class(int(dm.group(0)))
        else:
            self.error(f"unknown constructor {name!r}", start)
        self.expect(")")
        return node


def parse_spec(text: str, base_dir: str = ".") -> ClassSpec:
    """Parse a class expression such as ``closure(downset(12,21))``.

    Constructors: avoid(p,...), downset(p,...), closure(C), inflate(C,U),
    iterate(C,d), intersect(C,...), union(C,...), geom(path),
    oscillations(k), and the bare word ``all``.  Permutations longer than
    nine are written in brackets, e.g. ``[2 3 5 1 7 4 9 6 10 11 8]``.
    """
    p = _Parser(text, base_dir)
    spec = p.spec()
    p.skip()
    if p.pos != len(text):
        p.error("unexpected trailing input")
    return spec
