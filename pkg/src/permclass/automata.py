"""Finite automata over arbitrary finite alphabets.

Letters may be any hashable, orderable values; states of a :class:`Dfa` are
the integers ``0..n-1``.  Every operation returns a new automaton.
"""

from __future__ import annotations

import itertools
from collections import deque
from math import lcm
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .poly import Polynomial, RationalGF, bareiss_det, poly_gcd

Letter = Hashable
Word = tuple


class AlphabetMismatch(ValueError):
    pass


class NotSubwordClosed(ValueError):
    """The oracle accepted a word while rejecting one of its subwords."""

    def __init__(self, word, subword):
        super().__init__(f"oracle accepts {word!r} but rejects its subword {subword!r}")
        self.word = word
        self.subword = subword


class Dfa:
    """A complete deterministic automaton.

    ``delta[q]`` maps every letter to a state; missing transitions supplied
    at construction time are routed to a fresh sink state.
    """

    __slots__ = ("alphabet", "delta", "initial", "accepting")

    def __init__(self, alphabet: Iterable[Letter], delta: Sequence[Mapping[Letter, int]], initial: int, accepting: Iterable[int]):
        self.alphabet = tuple(sorted(set(alphabet)))
        rows = [dict(r) for r in delta]
        if not rows:
            rows = [{}]
        if any(a not in row for row in rows for a in self.alphabet):
            sink = len(rows)
            rows.append({})
            for row in rows:
                for a in self.alphabet:
                    row.setdefault(a, sink)
        self.delta = tuple(rows)
        self.initial = initial
        self.accepting = frozenset(accepting)

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def step(self, q: int, word: Iterable[Letter]) -> int:
        for a in word:
            q = self.delta[q][a]
        return q

    def accepts(self, word: Iterable[Letter]) -> bool:
        return self.step(self.initial, word) in self.accepting

    def __repr__(self) -> str:
        return f"<Dfa {self.n_states} states over {len(self.alphabet)} letters>"

    # --- structure helpers --------------------------------------------------

    def reachable(self) -> set[int]:
        seen = {self.initial}
        todo = [self.initial]
        while todo:
            q = todo.pop()
            for r in self.delta[q].values():
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return seen

    def coreachable(self) -> set[int]:
        back: dict[int, set[int]] = {q: set() for q in range(self.n_states)}
        for q, row in enumerate(self.delta):
            for r in row.values():
                back[r].add(q)
        seen = set(self.accepting)
        todo = list(seen)
        while todo:
            q = todo.pop()
            for p in back[q]:
                if p not in seen:
                    seen.add(p)
                    todo.append(p)
        return seen

    def useful(self) -> set[int]:
        return self.reachable() & self.coreachable()

    def is_empty(self) -> bool:
        return not (self.reachable() & self.accepting)

    def is_finite(self) -> bool:
        """True iff the language is finite (no cycle through useful states)."""
        live = self.useful()
        colour = {}

        def dfs(q):
            colour[q] = 1
            for r in self.delta[q].values():
                if r not in live:
                    continue
                if colour.get(r) == 1:
                    return False
                if r not in colour and not dfs(r):
                    return False
            colour[q] = 2
            return True

        return self.initial not in live or dfs(self.initial)


def _check_alphabets(a: Dfa, b: Dfa) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"alphabets differ: {a.alphabet} vs {b.alphabet}")


def product(a: Dfa, b: Dfa, accept: Callable[[bool, bool], bool]) -> Dfa:
    """Reachable product automaton; ``accept`` combines the two acceptance bits."""
    _check_alphabets(a, b)
    index = {(a.initial, b.initial): 0}
    order = [(a.initial, b.initial)]
    delta: list[dict] = []
    i = 0
    while i < len(order):
        p, q = order[i]
        row = {}
        for x in a.alphabet:
            nxt = (a.delta[p][x], b.delta[q][x])
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row[x] = index[nxt]
        delta.append(row)
        i += 1
    acc = [k for k, (p, q) in enumerate(order) if accept(p in a.accepting, q in b.accepting)]
    return Dfa(a.alphabet, delta, 0, acc)


def intersection(a: Dfa, b: Dfa) -> Dfa:
    return product(a, b, lambda x, y: x and y)


def union(a: Dfa, b: Dfa) -> Dfa:
    return product(a, b, lambda x, y: x or y)


def difference(a: Dfa, b: Dfa) -> Dfa:
    return product(a, b, lambda x, y: x and not y)


def complement(a: Dfa) -> Dfa:
    return Dfa(a.alphabet, a.delta, a.initial, set(range(a.n_states)) - a.accepting)


def minimize(a: Dfa) -> Dfa:
    """Minimal complete DFA, states numbered in breadth-first order from the start.

    The numbering makes the result canonical: two automata for the same
    language minimize to identical transition tables.
    """
    states = sorted(a.reachable())
    block = {q: int(q in a.accepting) for q in states}
    n_blocks = len(set(block.values()))
    while True:
        sigs = {q: (block[q], tuple(block[a.delta[q][x]] for x in a.alphabet)) for q in states}
        ids: dict = {}
        new_block = {q: ids.setdefault(sigs[q], len(ids)) for q in states}
        if len(ids) == n_blocks:
            block = new_block
            break
        block, n_blocks = new_block, len(ids)
    # canonical BFS renumbering
    order = {block[a.initial]: 0}
    queue = deque([a.initial])
    rep = {block[a.initial]: a.initial}
    while queue:
        q = queue.popleft()
        for x in a.alphabet:
            r = a.delta[q][x]
            if block[r] not in order:
                order[block[r]] = len(order)
                rep[block[r]] = r
                queue.append(r)
    delta = [None] * len(order)
    for b, idx in order.items():
        q = rep[b]
        delta[idx] = {x: order[block[a.delta[q][x]]] for x in a.alphabet}
    acc = [order[block[q]] for q in states if q in a.accepting and block[q] in order]
    return Dfa(a.alphabet, delta, 0, acc)


def equivalent(a: Dfa, b: Dfa) -> bool:
    return difference(a, b).is_empty() and difference(b, a).is_empty()


# --- nondeterministic automata -------------------------------------------------


class Nfa:
    """Nondeterministic automaton with optional epsilon moves (letter ``None``)."""

    def __init__(self, alphabet: Iterable[Letter], transitions: Mapping[int, Mapping[Letter, Iterable[int]]], initial: Iterable[int], accepting: Iterable[int]):
        self.alphabet = tuple(sorted(set(alphabet)))
        self.transitions = {q: {x: frozenset(t) for x, t in row.items()} for q, row in transitions.items()}
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)

    def _closure(self, states: Iterable[int]) -> frozenset:
        seen = set(states)
        todo = list(seen)
        while todo:
            q = todo.pop()
            for r in self.transitions.get(q, {}).get(None, ()):
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return frozenset(seen)

    def determinize(self) -> Dfa:
        start = self._closure(self.initial)
        index = {start: 0}
        order = [start]
        delta = []
        i = 0
        while i < len(order):
            cur = order[i]
            row = {}
            for x in self.alphabet:
                nxt = self._closure(r for q in cur for r in self.transitions.get(q, {}).get(x, ()))
                if nxt not in index:
                    index[nxt] = len(order)
                    order.append(nxt)
                row[x] = index[nxt]
            delta.append(row)
            i += 1
        acc = [k for k, s in enumerate(order) if s & self.accepting]
        return Dfa(self.alphabet, delta, 0, acc)

    def accepts(self, word: Iterable[Letter]) -> bool:
        cur = self._closure(self.initial)
        for x in word:
            cur = self._closure(r for q in cur for r in self.transitions.get(q, {}).get(x, ()))
        return bool(cur & self.accepting)


def hom_image(a: Dfa, h: Mapping[Letter, Letter]) -> Nfa:
    """Automaton for h(L) where ``h`` renames each letter (erasing is not supported)."""
    missing = set(a.alphabet) - set(h)
    if missing:
        raise ValueError(f"homomorphism undefined on {sorted(missing)}")
    trans: dict[int, dict] = {}
    for q, row in enumerate(a.delta):
        out: dict = {}
        for x, r in row.items():
            out.setdefault(h[x], set()).add(r)
        trans[q] = out
    return Nfa(set(h.values()), trans, [a.initial], a.accepting)


def inverse_hom(a: Dfa, h: Mapping[Letter, Letter]) -> Dfa:
    """Automaton for {w : h(w) in L}; ``h`` maps each new letter to a letter of ``a``."""
    bad = set(h.values()) - set(a.alphabet)
    if bad:
        raise AlphabetMismatch(f"image letters {sorted(bad)} not in the automaton alphabet")
    delta = [{y: row[h[y]] for y in h} for row in a.delta]
    return Dfa(h.keys(), delta, a.initial, a.accepting)


def subword_closure(a: Dfa) -> Dfa:
    """Automaton accepting every subword of every accepted word."""
    trans = {}
    for q, row in enumerate(a.delta):
        out = {x: {r} for x, r in row.items()}
        out[None] = set(row.values())
        trans[q] = out
    return minimize(Nfa(a.alphabet, trans, [a.initial], a.accepting).determinize())


# --- building blocks -----------------------------------------------------------


def all_words(alphabet: Iterable[Letter]) -> Dfa:
    return Dfa(alphabet, [{x: 0 for x in alphabet}], 0, [0])


def finite_language(words: Iterable[Word], alphabet: Iterable[Letter]) -> Dfa:
    """Trie automaton for a finite set of words."""
    alphabet = tuple(sorted(set(alphabet)))
    delta: list[dict] = [{}]
    acc = set()
    for w in words:
        q = 0
        for x in w:
            if x not in delta[q]:
                delta[q][x] = len(delta)
                delta.append({})
            q = delta[q][x]
        acc.add(q)
    return Dfa(alphabet, delta, 0, acc)


def avoid_subwords(forbidden: Iterable[Word], alphabet: Iterable[Letter]) -> Dfa:
    """Automaton for the words containing none of ``forbidden`` as a (scattered) subword.

    A state records, for each forbidden word, the length of its longest prefix
    embedded so far; greedy leftmost matching is optimal for subwords.
    """
    forbidden = [tuple(f) for f in forbidden]
    alphabet = tuple(sorted(set(alphabet)))
    if any(len(f) == 0 for f in forbidden):
        return Dfa(alphabet, [{x: 0 for x in alphabet}], 0, [])
    start = tuple(0 for _ in forbidden)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        st = order[i]
        row = {}
        for x in alphabet:
            if st is None:
                nxt = None
            else:
                nxt = tuple(k + 1 if k < len(f) and f[k] == x else k for k, f in zip(st, forbidden))
                if any(k == len(f) for k, f in zip(nxt, forbidden)):
                    nxt = None
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row[x] = index[nxt]
        delta.append(row)
        i += 1
    dead = index.get(None)
    acc = [k for k in range(len(order)) if k != dead]
    return minimize(Dfa(alphabet, delta, 0, acc))


def is_subword(v: Sequence, w: Sequence) -> bool:
    it = iter(w)
    return all(x in it for x in v)


def learn_subword_closed(oracle: Callable[[Word], bool], alphabet: Iterable[Letter], bound: int) -> tuple[list[Word], Dfa]:
    """Minimal rejected words up to length ``bound`` of a subword-closed language.

    Returns the forbidden words (in shortlex order) and the automaton of words
    avoiding all of them.  The automaton is exact whenever every minimal
    forbidden word has length at most ``bound``.
    """
    alphabet = tuple(sorted(set(alphabet)))
    if not oracle(()):
        return [()], avoid_subwords([()], alphabet)
    accepted = {()}
    forbidden: list[Word] = []
    for n in range(1, bound + 1):
        candidates = sorted({w[:i] + (x,) + w[i:] for w in accepted for i in range(n) for x in alphabet})
        level = set()
        for w in candidates:
            deletions = {w[:i] + w[i + 1 :] for i in range(n)}
            ok = [d in accepted for d in deletions]
            if oracle(w):
                if not all(ok):
                    raise NotSubwordClosed(w, next(d for d in sorted(deletions) if d not in accepted))
                level.add(w)
            elif all(ok):
                forbidden.append(w)
        accepted = level
        if not accepted:
            break
    return forbidden, avoid_subwords(forbidden, alphabet)


# --- counting and generating functions -----------------------------------------


def words(a: Dfa, n: int) -> Iterator[Word]:
    """Accepted words of length ``n`` in lexicographic order."""
    live = a.coreachable()
    # a branch is explored only if the count table says it still has words
    table = _count_table(a, n)

    def walk(q: int, left: int, prefix: tuple):
        if left == 0:
            if q in a.accepting:
                yield prefix
            return
        for x in a.alphabet:
            r = a.delta[q][x]
            if r in live and table[left - 1][r]:
                yield from walk(r, left - 1, prefix + (x,))

    if table[n][a.initial]:
        yield from walk(a.initial, n, ())


def _count_table(a: Dfa, n: int) -> list[list[int]]:
    """table[k][q] = number of accepted words of length k read from state q."""
    table = [[1 if q in a.accepting else 0 for q in range(a.n_states)]]
    for _ in range(n):
        prev = table[-1]
        table.append([sum(prev[r] for r in row.values()) for row in a.delta])
    return table


def count_words(a: Dfa, n: int) -> int:
    return _count_table(a, n)[n][a.initial]


def counts(a: Dfa, n_max: int) -> list[int]:
    """Numbers of accepted words of lengths 0..n_max."""
    table = _count_table(a, n_max)
    return [table[k][a.initial] for k in range(n_max + 1)]


def _trimmed(a: Dfa) -> tuple[list[int], dict[int, int]]:
    live = sorted(a.useful())
    return live, {q: i for i, q in enumerate(live)}


def weighted_gf(a: Dfa, weights: Mapping[Letter, RationalGF | Polynomial | int]) -> RationalGF:
    """Generating function of L(a) after substituting a series for each letter.

    Solves the transfer system (I - A) v = [accepting] over Q(x), where A sums
    the weights of the letters labelling each transition.  Denominators are
    cleared first and the initial-state component is read off by Cramer's
    rule, with both determinants taken by fraction-free elimination.
    """
    ws = {x: w if isinstance(w, RationalGF) else RationalGF(w) for x, w in weights.items()}
    missing = set(a.alphabet) - set(ws)
    if missing:
        raise ValueError(f"no weight for letters {sorted(missing)}")
    for x, w in ws.items():
        if w.constant_term != 0:
            raise ValueError(f"weight of {x!r} has a nonzero constant term")
    live, pos = _trimmed(a)
    if a.initial not in pos:
        return RationalGF(0)
    common = Polynomial.const(1)
    for w in ws.values():
        g = poly_gcd(common, w.den)
        common = (common * w.den).exact_div(g) if g.degree > 0 else common * w.den
    scaled = {x: (w.num * common).exact_div(w.den) for x, w in ws.items()}
    n = len(live)
    m = [[Polynomial() for _ in range(n)] for _ in range(n)]
    for i, q in enumerate(live):
        m[i][i] = m[i][i] + common
        for x, r in a.delta[q].items():
            if r in pos:
                m[i][pos[r]] = m[i][pos[r]] - scaled[x]
    rhs = [common if q in a.accepting else Polynomial() for q in live]
    det = bareiss_det(m)
    k = pos[a.initial]
    replaced = [row[:k] + [rhs[i]] + row[k + 1 :] for i, row in enumerate(m)]
    return RationalGF(bareiss_det(replaced), det)


def gf_of_dfa(a: Dfa) -> RationalGF:
    """Ordinary generating function sum x^|w| over the accepted words."""
    return weighted_gf(a, {x: Polynomial.x() for x in a.alphabet})


class IdentificationError(RuntimeError):
    pass


# --- text exchange format ------------------------------------------------------

FORMAT_HEADER = "# dfa-table v1"


def to_text(a: Dfa, letter_name: Callable[[Letter], str] = str) -> str:
    """Plain-text transition table.

    Layout::

        # dfa-table v1
        alphabet: a b
        states: 2
        initial: 0
        accepting: 0
        0 a 1
        ...
    """
    names = [letter_name(x) for x in a.alphabet]
    lines = [
        FORMAT_HEADER,
        "alphabet: " + " ".join(names),
        f"states: {a.n_states}",
        f"initial: {a.initial}",
        "accepting: " + " ".join(str(q) for q in sorted(a.accepting)),
    ]
    for q, row in enumerate(a.delta):
        for x, name in zip(a.alphabet, names):
            lines.append(f"{q} {name} {row[x]}")
    return "\n".join(lines) + "\n"


def from_text(text: str, parse_letter: Callable[[str], Letter] = str) -> Dfa:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_HEADER:
        raise ValueError(f"line 1: expected {FORMAT_HEADER!r}")
    header = {}
    body = []
    for lineno, ln in enumerate(lines[1:], 2):
        key, sep, rest = ln.partition(":")
        if sep and key in ("alphabet", "states", "initial", "accepting"):
            header[key] = rest.split()
        else:
            parts = ln.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'state letter state', got {ln!r}")
            body.append((lineno, parts))
    for key in ("alphabet", "states", "initial", "accepting"):
        if key not in header:
            raise ValueError(f"missing '{key}:' line")
    letters = {name: parse_letter(name) for name in header["alphabet"]}
    n = int(header["states"][0])
    delta: list[dict] = [{} for _ in range(n)]
    for lineno, (q, name, r) in body:
        if name not in letters:
            raise ValueError(f"line {lineno}: unknown letter {name!r}")
        delta[int(q)][letters[name]] = int(r)
    return Dfa(letters.values(), delta, int(header["initial"][0]), (int(q) for q in header["accepting"]))


def learn_dfa(member: Callable[[Word], bool], alphabet: Iterable[Letter], counterexample: Callable[[Dfa], Word | None], max_rounds: int = 200) -> Dfa:
    """Active automaton learning with an observation table.

    ``member`` answers membership queries; ``counterexample`` returns a word
    on which a hypothesis errs, or None to accept it.  Every suffix of a
    counterexample joins the experiment set, which keeps rows distinct.
    """
    alphabet = tuple(sorted(set(alphabet)))
    cache: dict[Word, bool] = {}

    def ask(w: Word) -> bool:
        if w not in cache:
            cache[w] = member(w)
        return cache[w]

    experiments: list[Word] = [()]
    for _ in range(max_rounds):
        reps: list[Word] = [()]
        index: dict[tuple, int] = {}
        delta: list[dict] = []

        def row(p: Word) -> tuple:
            return tuple(ask(p + e) for e in experiments)

        index[row(())] = 0
        i = 0
        while i < len(reps):
            p = reps[i]
            trans = {}
            for x in alphabet:
                r = row(p + (x,))
                if r not in index:
                    index[r] = len(reps)
                    reps.append(p + (x,))
                trans[x] = index[r]
            delta.append(trans)
            i += 1
        hyp = Dfa(alphabet, delta, 0, [k for k, p in enumerate(reps) if ask(p)])
        cex = counterexample(hyp)
        if cex is None:
            return minimize(hyp)
        known = set(experiments)
        for j in range(len(cex) + 1):
            suffix = tuple(cex[j:])
            if suffix not in known:
                known.add(suffix)
                experiments.append(suffix)
    raise IdentificationError(f"no consistent automaton after {max_rounds} rounds")
