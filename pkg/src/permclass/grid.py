"""Geometric grid classes: 0/±1 matrices, the word encoding and its automata.

Matrices are indexed Cartesian-style, ``M[k, l]`` with column ``k`` counted
from the left and row ``l`` from the bottom, both 1-based.  Text files list
rows top to bottom, the way a matrix is drawn, and are flipped on load.

A letter of the cell alphabet is the pair ``(k, l)`` of a nonzero cell;
letters are ordered as tuples, which fixes the order used for
lexicographically least preimages.
"""

from __future__ import annotations

import heapq
import itertools
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from . import automata
from .automata import Dfa
from .perm import Perm, all_perms, avoids, contains, is_simple

Cell = tuple[int, int]
Word = tuple[Cell, ...]


class NotPartialMultiplication(ValueError):
    pass


class CertificationError(RuntimeError):
    def __init__(self, message: str, length: int):
        super().__init__(message)
        self.length = length


@dataclass(frozen=True)
class GridMatrix:
    entries: tuple[tuple[int, ...], ...]  # entries[k-1][l-1]
    col_signs: tuple[int, ...] | None = None
    row_signs: tuple[int, ...] | None = None

    def __post_init__(self):
        cols = tuple(tuple(int(v) for v in col) for col in self.entries)
        object.__setattr__(self, "entries", cols)
        if len({len(c) for c in cols}) > 1:
            raise ValueError("ragged matrix")
        if any(v not in (-1, 0, 1) for c in cols for v in c):
            raise ValueError("entries must be -1, 0 or 1")
        for name, size in (("col_signs", self.t), ("row_signs", self.u)):
            signs = getattr(self, name)
            if signs is None:
                continue
            signs = tuple(int(s) for s in signs)
            if len(signs) != size or any(s not in (-1, 1) for s in signs):
                raise ValueError(f"{name} must be {size} values of +-1")
            object.__setattr__(self, name, signs)
        if self.has_signs:
            for (k, l) in self.cells:
                if self[k, l] != self.col_signs[k - 1] * self.row_signs[l - 1]:
                    raise NotPartialMultiplication(f"entry ({k},{l}) disagrees with the given signs")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], col_signs=None, row_signs=None) -> "GridMatrix":
        """Build from rows listed top to bottom, as a matrix is printed."""
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            return cls((), col_signs, row_signs)
        t = len(rows[0])
        if any(len(r) != t for r in rows):
            raise ValueError("ragged matrix")
        bottom_up = rows[::-1]
        return cls(tuple(tuple(r[k] for r in bottom_up) for k in range(t)), col_signs, row_signs)

    @property
    def t(self) -> int:
        return len(self.entries)

    @property
    def u(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def has_signs(self) -> bool:
        return self.col_signs is not None and self.row_signs is not None

    def __getitem__(self, kl: Cell) -> int:
        k, l = kl
        return self.entries[k - 1][l - 1]

    def rows(self) -> list[list[int]]:
        """Rows top to bottom."""
        return [[self.entries[k][l] for k in range(self.t)] for l in reversed(range(self.u))]

    @property
    def cells(self) -> tuple[Cell, ...]:
        return tuple((k, l) for k in range(1, self.t + 1) for l in range(1, self.u + 1) if self[k, l])

    def with_signs(self) -> "GridMatrix":
        """This matrix with column and row signs, inferring them if absent."""
        if self.has_signs:
            return self
        signs = infer_signs(self)
        if signs is None:
            raise NotPartialMultiplication("matrix is not a partial multiplication matrix")
        return GridMatrix(self.entries, *signs)

    def to_text(self) -> str:
        lines = [" ".join(str(v) for v in r) for r in self.rows()]
        if self.has_signs:
            lines.append("cols: " + " ".join("+" if s > 0 else "-" for s in self.col_signs))
            lines.append("rows: " + " ".join("+" if s > 0 else "-" for s in self.row_signs))
        return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> GridMatrix:
    """Parse the matrix file format; errors carry 1-based line numbers."""
    rows = []
    signs: dict[str, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"(cols|rows)\s*:\s*(.*)", line)
        if m:
            vals = []
            for tok in m.group(2).split():
                if tok in ("+", "+1", "1"):
                    vals.append(1)
                elif tok in ("-", "-1"):
                    vals.append(-1)
                else:
                    raise ValueError(f"line {lineno}: bad sign {tok!r}")
            signs[m.group(1)] = vals
            continue
        if signs:
            raise ValueError(f"line {lineno}: matrix row after sign lines")
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError:
            raise ValueError(f"line {lineno}: expected integers -1, 0, 1, got {line!r}") from None
        if any(v not in (-1, 0, 1) for v in row):
            raise ValueError(f"line {lineno}: entries must be -1, 0 or 1")
        if rows and len(row) != len(rows[0]):
            raise ValueError(f"line {lineno}: expected {len(rows[0])} entries, got {len(row)}")
        rows.append(row)
    cols = signs.get("cols")
    rws = signs.get("rows")
    if (cols is None) != (rws is None):
        raise ValueError("give both 'cols:' and 'rows:' lines or neither")
    return GridMatrix.from_rows(rows, cols, rws)


def load_matrix(path) -> GridMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


# --- words --------------------------------------------------------------------


def parse_word(text: str) -> Word:
    """Read ``"1,2 3,2"`` or the compact ``"a12 a32"`` / ``"a12a32"``."""
    text = text.strip()
    if not text:
        return ()
    if "," in text:
        out = []
        for tok in text.split():
            m = re.fullmatch(r"(\d+),(\d+)", tok)
            if not m:
                raise ValueError(f"malformed cell {tok!r}")
            out.append((int(m.group(1)), int(m.group(2))))
        return tuple(out)
    compact = text.replace(" ", "")
    if not re.fullmatch(r"(a\d\d)+", compact):
        raise ValueError(f"malformed word {text!r}")
    return tuple((int(compact[i + 1]), int(compact[i + 2])) for i in range(0, len(compact), 3))


def format_word(word: Iterable[Cell]) -> str:
    word = list(word)
    if all(k <= 9 and l <= 9 for k, l in word):
        return " ".join(f"a{k}{l}" for k, l in word)
    return " ".join(f"{k},{l}" for k, l in word)


# --- signs and doubling ---------------------------------------------------------


def row_column_graph(m: GridMatrix) -> dict:
    """Bipartite graph with column vertices ('x', k), row vertices ('y', l)."""
    vertices = [("x", k) for k in range(1, m.t + 1)] + [("y", l) for l in range(1, m.u + 1)]
    edges = [(("x", k), ("y", l)) for k, l in m.cells]
    return {"vertices": vertices, "edges": edges}


def is_forest(graph: dict) -> bool:
    parent = {v: v for v in graph["vertices"]}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in graph["edges"]:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def find_cycle(graph: dict) -> list | None:
    """A cycle as a vertex list (first vertex not repeated), or None."""
    adj: dict = {v: [] for v in graph["vertices"]}
    for a, b in graph["edges"]:
        adj[a].append(b)
        adj[b].append(a)
    seen: dict = {}
    for root in graph["vertices"]:
        if root in seen:
            continue
        seen[root] = None
        stack = [(root, iter(adj[root]))]
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                continue
            if nxt == seen[v]:
                continue
            if nxt in seen:
                path = [s for s, _ in stack]
                return path[path.index(nxt) :]
            seen[nxt] = v
            stack.append((nxt, iter(adj[nxt])))
    return None


def infer_signs(m: GridMatrix) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Column and row signs witnessing the partial multiplication property.

    Within each connected component of the row-column graph the lowest
    column receives sign +1; isolated rows and columns get +1.
    """
    col: dict[int, int] = {}
    row: dict[int, int] = {}
    for start in range(1, m.t + 1):
        if start in col:
            continue
        col[start] = 1
        queue = deque([("x", start)])
        while queue:
            kind, i = queue.popleft()
            if kind == "x":
                for l in range(1, m.u + 1):
                    v = m[i, l]
                    if not v:
                        continue
                    want = v * col[i]
                    if l not in row:
                        row[l] = want
                        queue.append(("y", l))
                    elif row[l] != want:
                        return None
            else:
                for k in range(1, m.t + 1):
                    v = m[k, i]
                    if not v:
                        continue
                    want = v * row[i]
                    if k not in col:
                        col[k] = want
                        queue.append(("x", k))
                    elif col[k] != want:
                        return None
    return tuple(col[k] for k in range(1, m.t + 1)), tuple(row.get(l, 1) for l in range(1, m.u + 1))


def double(m: GridMatrix) -> GridMatrix:
    """The doubled matrix: 1 becomes an increasing pair of cells, -1 a decreasing pair.

    The result always carries the signs c_k = (-1)^k, r_l = (-1)^l.
    """
    t, u = 2 * m.t, 2 * m.u
    cols = [[0] * u for _ in range(t)]
    for k, l in m.cells:
        i, j = 2 * k - 2, 2 * l - 2  # 0-based lower-left of the 2x2 block
        if m[k, l] == 1:
            cols[i][j] = cols[i + 1][j + 1] = 1
        else:
            cols[i][j + 1] = cols[i + 1][j] = -1
    signs_c = tuple((-1) ** k for k in range(1, t + 1))
    signs_r = tuple((-1) ** l for l in range(1, u + 1))
    return GridMatrix(tuple(map(tuple, cols)), signs_c, signs_r)


# --- decoding ---------------------------------------------------------------------


def decode(m: GridMatrix, word: Sequence[Cell]) -> tuple[Perm, tuple[int, ...]]:
    """The permutation drawn by ``word`` and the map from its positions to letter indices.

    Letter i is placed on its cell's segment at distance i/(n+1) from the
    cell's base point; coordinates are scaled by n+1 to stay integral.
    """
    if not m.has_signs:
        raise NotPartialMultiplication("decoding needs column and row signs")
    n = len(word)
    s = n + 1
    xs, ys = [], []
    for i, (k, l) in enumerate(word, 1):
        if not (1 <= k <= m.t and 1 <= l <= m.u) or not m[k, l]:
            raise ValueError(f"letter a{k}{l} is not a nonzero cell")
        xs.append((k - 1) * s + i if m.col_signs[k - 1] > 0 else k * s - i)
        ys.append((l - 1) * s + i if m.row_signs[l - 1] > 0 else l * s - i)
    by_x = sorted(range(n), key=xs.__getitem__)
    perm = Perm.standardize([ys[j] for j in by_x])
    psi = tuple(j + 1 for j in by_x)
    return perm, psi


def phi(m: GridMatrix, word: Sequence[Cell]) -> Perm:
    return decode(m, word)[0]


# --- griddings and membership -----------------------------------------------------


def _cut_assignments(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Non-decreasing maps from 0..n-1 to 1..parts (one per placement of gridlines)."""
    for cuts in itertools.combinations_with_replacement(range(n + 1), parts - 1):
        bounds = (0,) + cuts + (n,)
        out = []
        for part in range(parts):
            out.extend([part + 1] * (bounds[part + 1] - bounds[part]))
        yield tuple(out)


def griddings(m: GridMatrix, pi: Sequence[int]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every monotone gridding of ``pi``: the column and row of each position.

    Gridlines split positions into columns and values into rows; each entry
    must land in a nonzero cell, and the entries of a cell must increase
    (cell value 1) or decrease (cell value -1).  Rows are assigned in value
    order, so monotonicity is checked against the previous entry of the cell.
    """
    n = len(pi)
    if m.t == 0 or m.u == 0:
        if n == 0:
            yield (), ()
        return
    inv = [0] * n
    for p, v in enumerate(pi):
        inv[v - 1] = p
    for col in _cut_assignments(n, m.t):
        row = [0] * n
        last: dict[Cell, int] = {}

        def rec(v: int, lo: int):
            if v == n:
                yield col, tuple(row)
                return
            p = inv[v]
            k = col[p]
            for l in range(lo, m.u + 1):
                sign = m[k, l]
                if not sign:
                    continue
                prev = last.get((k, l))
                if prev is not None and (prev < p) != (sign > 0):
                    continue
                last[(k, l)] = p
                row[p] = l
                yield from rec(v + 1, l)
                if prev is None:
                    del last[(k, l)]
                else:
                    last[(k, l)] = prev

        yield from rec(0, 1)


def _distance_constraints(m: GridMatrix, pi: Sequence[int], col, row) -> tuple[list[list[int]], list[int]]:
    """Successor lists and in-degrees of the forced order on distances from base points.

    In a column read left to right (sign +1) distances grow with position,
    otherwise they shrink; rows likewise with value.
    """
    n = len(pi)
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n

    def chain(ordered: list[int]):
        for a, b in zip(ordered, ordered[1:]):
            succ[a].append(b)
            indeg[b] += 1

    for k in range(1, m.t + 1):
        members = [p for p in range(n) if col[p] == k]
        chain(members if m.col_signs[k - 1] > 0 else members[::-1])
    for l in range(1, m.u + 1):
        members = sorted((p for p in range(n) if row[p] == l), key=lambda p: pi[p])
        chain(members if m.row_signs[l - 1] > 0 else members[::-1])
    return succ, indeg


def _least_extension(m: GridMatrix, pi: Sequence[int], col, row) -> Word | None:
    """Lexicographically least word realizing a gridding, or None if the gridding is not drawable.

    Two entries available at the same time lie in different cells, so
    repeatedly taking the smallest available letter is well defined.
    """
    succ, indeg = _distance_constraints(m, pi, col, row)
    ready = [((col[p], row[p]), p) for p in range(len(pi)) if indeg[p] == 0]
    heapq.heapify(ready)
    word = []
    while ready:
        letter, p = heapq.heappop(ready)
        word.append(letter)
        for q in succ[p]:
            indeg[q] -= 1
            if indeg[q] == 0:
                heapq.heappush(ready, ((col[q], row[q]), q))
    return tuple(word) if len(word) == len(pi) else None


def geom_witness(m: GridMatrix, pi: Sequence[int]) -> tuple[GridMatrix, Word] | None:
    """A word drawing ``pi`` together with the signed matrix it is read over.

    Matrices that are not partial multiplication matrices are doubled first.
    Every gridding places each entry on a cell; the columns and rows then
    force an order on the distances from base points, and the gridding is
    realizable on the matrix exactly when that order is acyclic.
    """
    try:
        signed = m.with_signs()
    except NotPartialMultiplication:
        signed = double(m)
    pi = tuple(pi)
    for col, row in griddings(signed, pi):
        word = _least_extension(signed, pi, col, row)
        if word is not None:
            return signed, word
    return None


def geom_member(m: GridMatrix, pi: Sequence[int]) -> bool:
    return geom_witness(m, pi) is not None


def grid_member(m: GridMatrix, pi: Sequence[int]) -> bool:
    """Monotone grid class membership: some gridding exists at all."""
    return next(griddings(m, tuple(pi)), None) is not None


@lru_cache(maxsize=None)
def geom_class(m: GridMatrix, n: int) -> tuple[Perm, ...]:
    """Members of length ``n``, by filtering all n! permutations."""
    return tuple(p for p in all_perms(n) if geom_member(m, p))


def decoded_class(m: GridMatrix, n: int) -> set[Perm]:
    """Members of length ``n``, by decoding every word of length ``n``."""
    m = m.with_signs()
    return {decode(m, w)[0] for w in itertools.product(m.cells, repeat=n)}


def fibre_sizes(m: GridMatrix, n: int) -> Counter:
    """Number of words of length ``n`` decoding to each permutation."""
    m = m.with_signs()
    return Counter(decode(m, w)[0] for w in itertools.product(m.cells, repeat=n))


# --- normal forms -------------------------------------------------------------------


def commute(a: Cell, b: Cell) -> bool:
    """Letters of cells sharing neither a column nor a row commute under decoding."""
    return a[0] != b[0] and a[1] != b[1]


def trace_normal_form(alphabet: Sequence[Cell]) -> Dfa:
    """Words with no factor b u a where a < b commute and every letter of u commutes with a.

    These are the lexicographically least representatives of the commutation
    classes.  A state is the set of letters that may not come next.
    """
    alphabet = tuple(sorted(alphabet))
    start: frozenset = frozenset()
    index = {start: 0}
    order = [start]
    delta = []
    dead = -1
    i = 0
    while i < len(order):
        blocked = order[i]
        row = {}
        for c in alphabet:
            if c in blocked:
                row[c] = dead
                continue
            nxt = frozenset(a for a in alphabet if commute(a, c) and (a < c or a in blocked))
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row[c] = index[nxt]
        delta.append(row)
        i += 1
    sink = len(order)
    delta = [{c: (sink if q == dead else q) for c, q in row.items()} for row in delta]
    delta.append({c: sink for c in alphabet})
    return Dfa(alphabet, delta, 0, range(len(order)))


def least_preimages(m: GridMatrix, n: int) -> dict[Perm, Word]:
    """The lexicographically least word decoding to each member of length ``n``.

    Only words in trace normal form are visited: any other word has a
    lexicographically smaller commutation-equivalent word with the same image.
    """
    m = m.with_signs()
    lnf = _lnf(m)
    found: dict[Perm, Word] = {}
    for w in automata.words(lnf, n):
        p = decode(m, w)[0]
        if p not in found:
            found[p] = w
    return found


def least_preimage(m: GridMatrix, pi: Sequence[int]) -> Word | None:
    """The canonical (lexicographically least) word decoding to ``pi``, if any."""
    m = m.with_signs()
    pi = tuple(pi)
    words = (_least_extension(m, pi, col, row) for col, row in griddings(m, pi))
    return min((w for w in words if w is not None), default=None)


@lru_cache(maxsize=None)
def _lnf(m: GridMatrix) -> Dfa:
    return trace_normal_form(m.cells)


@dataclass(frozen=True)
class NormalForm:
    matrix: GridMatrix
    dfa: Dfa
    horizon: int
    certified_to: int
    class_counts: tuple[int, ...] = field(default=())


@lru_cache(maxsize=None)
def normal_form_automaton(m: GridMatrix, certify: int = 7, horizon: int | None = None) -> NormalForm:
    """Automaton accepting the lexicographically least preimage of each member.

    An automaton is learned from membership queries (answered exactly by
    :func:`least_preimage`) and is refined until it accepts precisely the
    least preimages of every length up to ``horizon``.  It is then certified
    against the class itself for every length up to ``certify``: accepted
    words must decode injectively onto the members found by the membership
    filter.  Failure raises :class:`CertificationError` with the length.
    """
    m = m.with_signs()
    horizon = certify if horizon is None else horizon
    least = {n: set(least_preimages(m, n).values()) for n in range(horizon + 1)}

    def member(w) -> bool:
        if len(w) <= horizon:
            return w in least[len(w)]
        return least_preimage(m, decode(m, w)[0]) == w

    def counterexample(hyp: Dfa):
        for n in range(horizon + 1):
            diff = set(automata.words(hyp, n)) ^ least[n]
            if diff:
                return min(diff)
        return None

    dfa = automata.learn_dfa(member, m.cells, counterexample)
    counts = []
    for n in range(certify + 1):
        images = [decode(m, w)[0] for w in automata.words(dfa, n)]
        members = set(geom_class(m, n))
        if len(set(images)) != len(images) or set(images) != members:
            raise CertificationError(f"automaton fails bijectivity at length {n}", n)
        counts.append(len(members))
    return NormalForm(m, dfa, horizon, certify, tuple(counts))


# --- subclasses and simples ------------------------------------------------------


@dataclass(frozen=True)
class SubclassLanguage:
    dfa: Dfa
    forbidden: tuple[Word, ...]
    certified: bool
    checked_to: int
    mismatch: int | None = None


def subclass_language(m: GridMatrix, basis: Iterable[Sequence[int]], bound: int, normal: NormalForm | None = None) -> SubclassLanguage:
    """Automaton encoding Geom(M) ∩ Av(basis) one word per permutation.

    The words whose image avoids the basis form a subword-closed language;
    its minimal forbidden words are no longer than the longest basis element,
    so learning up to ``bound`` is exact.  The result is certified by counts
    against direct enumeration up to bound + 2.
    """
    m = m.with_signs()
    basis = [tuple(b) for b in basis]
    if basis and bound < max(map(len, basis)):
        raise ValueError("bound must be at least the longest basis element")
    normal = normal or normal_form_automaton(m, certify=min(bound + 2, 7))
    forbidden, avoiding = automata.learn_subword_closed(lambda w: avoids(decode(m, w)[0], basis), m.cells, bound)
    dfa = automata.minimize(automata.intersection(normal.dfa, avoiding))
    top = bound + 2
    mismatch = None
    for n in range(top + 1):
        expected = sum(1 for p in geom_class(m, n) if avoids(p, basis))
        if automata.count_words(dfa, n) != expected:
            mismatch = n
            break
    return SubclassLanguage(dfa, tuple(forbidden), mismatch is None, top, mismatch)


def simple_encoding_language(m: GridMatrix, bound: int) -> Dfa:
    """Acyclic automaton with one word (the least preimage) per simple member of length <= bound."""
    m = m.with_signs()
    chosen = []
    for n in range(2, bound + 1):
        for p, w in least_preimages(m, n).items():
            if is_simple(p):
                chosen.append(w)
    return automata.minimize(automata.finite_language(chosen, m.cells))


CYCLE_MATRIX = GridMatrix.from_rows([[-1, 1, 1], [0, -1, -1]])

