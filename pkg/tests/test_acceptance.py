"""Acceptance criteria, one check per criterion.

Each check returns (ok, detail).  Under pytest every criterion is a test and
the PASS/FAIL lines are repeated in the terminal summary; run this file
directly to get the lines alone.
"""

import itertools
import random
import sys
import time
from decimal import Decimal
from math import comb

import pytest

from permclass import automata as A
from permclass.classes import Avoid, ExplicitDownset, Inflation, SubstClosure, closure_basis, enumerate_class, is_left_greedy, u_decompositions, u_profile
from permclass.gf import Series, class_series, closure_system, fit_rational, kappa
from permclass.grid import CYCLE_MATRIX, GridMatrix, decode, geom_class, geom_member, normal_form_automaton, parse_word, phi
from permclass.perm import (
    Perm,
    all_perms,
    antichain_element,
    avoids,
    contains,
    embeddings,
    is_parallel_alternation,
    is_simple,
    parallel_alternation_census,
    simples,
)
from permclass.poly import Polynomial, RationalGF

P = Perm.parse
X = Polynomial.x()
SEPARABLE_GENS = ExplicitDownset((P("12"), P("21")))
SEPARABLE_COUNTS = [1, 2, 6, 22, 90, 394, 1806]
CYCLE_SIGNED = GridMatrix(CYCLE_MATRIX.entries, (-1, 1, 1), (-1, 1))


def timed(limit):
    def wrap(fn):
        def run():
            start = time.perf_counter()
            ok, detail = fn()
            elapsed = time.perf_counter() - start
            if limit is not None and elapsed >= limit:
                return False, f"{detail}; took {elapsed:.1f}s, limit {limit}s"
            return ok, f"{detail}; {elapsed:.2f}s"

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


@timed(1)
def criterion_1():
    """sample word decodes to 6327415, confirmed by grid search"""
    pi, _ = decode(CYCLE_SIGNED, parse_word("a12 a32 a21 a31 a32 a12 a22"))
    ok = pi == P("6327415") and geom_member(CYCLE_MATRIX, pi)
    return ok, f"decoded {pi}"


@timed(None)
def criterion_2():
    """391867452 contains 51342 with witness 2,3,5,6,9"""
    found = set(embeddings(P("391867452"), P("51342")))
    return (2, 3, 5, 6, 9) in found, f"{len(found)} embeddings"


@timed(60)
def criterion_3():
    """closure of {12,21}: counts, brute-force Av(2413,3142), closure basis"""
    counts = enumerate_class(SubstClosure(SEPARABLE_GENS), 7)
    brute = [sum(1 for p in all_perms(n) if avoids(p, [P("2413"), P("3142")])) for n in range(1, 8)]
    basis = [str(p) for p in closure_basis(SEPARABLE_GENS, 6).elements]
    ok = counts == SEPARABLE_COUNTS == brute and basis == ["2413", "3142"]
    return ok, f"counts {counts}, brute {brute}, basis {basis}"


@timed(None)
def criterion_4():
    """closure system series matches, and no rational fit at degree 3"""
    series = class_series(closure_system(SEPARABLE_GENS), (), 14)
    gf = fit_rational(series, 3)
    ok = series.counts()[:7] == SEPARABLE_COUNTS and gf is None
    return ok, f"series {series.counts()}, fit {gf}"


LAYERED_GF = RationalGF(X, 1 - 2 * X)


@timed(10)
def criterion_5():
    """layered class: 2^(n-1), word substitution, fitted GF x/(1-2x)"""
    counts = enumerate_class(Inflation(Avoid((P("21"),)), Avoid((P("12"),))), 10)
    nf = normal_form_automaton(GridMatrix.from_rows([[1]]), 4)
    words = A.weighted_gf(nf.dfa, {c: RationalGF(X, 1 - X) for c in nf.dfa.alphabet}) - 1
    gf = fit_rational(Series.from_counts(counts), 3)
    expected = [2 ** (n - 1) for n in range(1, 11)]
    ok = counts == expected and words.series(11)[1:] == expected and gf == LAYERED_GF
    return ok, f"counts {counts}, substituted {words}, fit {gf}"


@timed(300)
def criterion_6():
    """cycle matrix normal form counts match brute force to 7; 1000 subword pairs keep order"""
    nf = normal_form_automaton(CYCLE_MATRIX, 7)
    auto = A.counts(nf.dfa, 7)
    brute = [len(geom_class(CYCLE_MATRIX, n)) for n in range(8)]
    distinct = all(len({phi(nf.matrix, w) for w in A.words(nf.dfa, n)}) == auto[n] for n in range(8))
    rng = random.Random(20240611)
    cells = CYCLE_SIGNED.cells
    bad = 0
    for _ in range(1000):
        word = [rng.choice(cells) for _ in range(rng.randint(0, 10))]
        sub = [c for c in word if rng.random() < 0.5]
        if not contains(phi(CYCLE_SIGNED, word), phi(CYCLE_SIGNED, sub)):
            bad += 1
    ok = auto == brute and distinct and nf.certified_to == 7 and bad == 0
    return ok, f"automaton {auto}, brute {brute}, order violations {bad}"


@timed(300)
def criterion_7():
    """simples census, parallel alternation census, one-point deletion checks"""
    census = [sum(1 for p in all_perms(n) if is_simple(p)) for n in range(4, 8)]
    listed = [len(simples(n)) for n in range(4, 8)]
    alternations = {n: parallel_alternation_census(n)[0] for n in range(5, 13)}
    alt_ok = all(c == (4 if n % 2 == 0 else 0) for n, c in alternations.items())
    failures = []
    for n in range(5, 9):
        for s in simples(n):
            deletions = [s.delete(i) for i in range(1, n + 1)]
            if is_parallel_alternation(s):
                twice = [d.delete(i) for d in deletions for i in range(1, n)]
                if any(is_simple(d) for d in deletions) or not any(is_simple(d) for d in twice):
                    failures.append(s)
            elif not any(is_simple(d) for d in deletions):
                failures.append(s)
    ok = census == listed == [2, 6, 46, 338] and alt_ok and not failures
    return ok, f"simples {census}, alternations {alternations}, deletion failures {len(failures)}"


@timed(None)
def criterion_8():
    """profile of 12345 in Av(123) and its single left-greedy decomposition"""
    u = Avoid((P("123"),))
    profile = u_profile(P("12345"), u)
    over = [d for d in u_decompositions(P("12345"), u) if d.skeleton == profile]
    greedy = [str(d) for d in over if is_left_greedy(d, u)]
    ok = profile == P("123") and len(over) == 3 and greedy == ["123[12,12,1]"]
    return ok, f"profile {profile}, {len(over)} decompositions, left-greedy {greedy}"


@timed(None)
def criterion_9():
    """real root of x^3 - 2x^2 - 1"""
    k = kappa(30)
    residual = abs(k**3 - 2 * k**2 - 1)
    ok = residual < Decimal("1e-25") and round(k, 5) == Decimal("2.20557")
    return ok, f"root {k}, residual {residual:.1e}"


@timed(None)
def criterion_10():
    """antichain elements 1 and 4, pairwise incomparability of 1..5"""
    elems = [antichain_element(k) for k in range(1, 6)]
    comparable = [(a, b) for a, b in itertools.permutations(elems, 2) if contains(a, b)]
    ok = elems[0] == P("23451") and elems[3] == Perm((2, 3, 5, 1, 7, 4, 9, 6, 10, 11, 8)) and not comparable
    return ok, f"first {elems[0].to_text()}, fourth {elems[3].to_text()}, comparable pairs {len(comparable)}"


def _schroder(n_max):
    r = [1, 2]
    for n in range(2, n_max + 1):
        r.append(((6 * n - 3) * r[-1] - (n - 2) * r[-2]) // (n + 1))
    return r


@timed(None)
def criterion_11():
    """100 random rationals recovered; Catalan and Schroder rejected"""
    rng = random.Random(7)
    misses = 0
    for _ in range(100):
        num = Polynomial([rng.randint(-6, 6) for _ in range(rng.randint(1, 4))])
        den = Polynomial([1] + [rng.randint(-6, 6) for _ in range(rng.randint(0, 3))])
        gf = RationalGF(num, den)
        if fit_rational(Series(tuple(int(c) for c in gf.series(21))), 3) != gf:
            misses += 1
    catalan = fit_rational(Series.from_counts([comb(2 * n, n) // (n + 1) for n in range(1, 15)]), 3)
    schroder = fit_rational(Series.from_counts(_schroder(14)[1:]), 3)
    ok = misses == 0 and catalan is None and schroder is None
    return ok, f"random misses {misses}, Catalan fit {catalan}, Schroder fit {schroder}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def line(fn, ok, detail):
    number = fn.__name__.split("_")[1]
    return f"criterion {number}: {'PASS' if ok else 'FAIL'}  {fn.__doc__}: {detail}"


@pytest.mark.parametrize("check", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(check, acceptance_log):
    ok, detail = check()
    text = line(check, ok, detail)
    acceptance_log.append(text)
    print(text)
    assert ok, text


@pytest.mark.xfail(strict=True, reason="x(1-x)/(1-2x) expands to 1, 1, 2, 4, ... and cannot fit 2^(n-1)")
def test_criterion_5_literal_gf():
    counts = [2 ** (n - 1) for n in range(1, 11)]
    assert fit_rational(Series.from_counts(counts), 3) == RationalGF(X * (1 - X), 1 - 2 * X)


if __name__ == "__main__":
    results = [(fn, *fn()) for fn in CRITERIA]
    for fn, ok, detail in results:
        print(line(fn, ok, detail))
    sys.exit(0 if all(ok for _, ok, _ in results) else 1)
