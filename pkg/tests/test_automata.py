import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permclass import automata as A
from permclass.poly import Polynomial, RationalGF

X = Polynomial.x()
AB = ("a", "b")


@st.composite
def dfas(draw, alphabet=AB, max_states=4):
    n = draw(st.integers(1, max_states))
    delta = [{x: draw(st.integers(0, n - 1)) for x in alphabet} for _ in range(n)]
    acc = draw(st.sets(st.integers(0, n - 1)))
    return A.Dfa(alphabet, delta, 0, acc)


def language(a, n_max=6, alphabet=AB):
    return {w for n in range(n_max + 1) for w in itertools.product(alphabet, repeat=n) if a.accepts(w)}


@settings(max_examples=60)
@given(dfas(), dfas())
def test_boolean_operations(a, b):
    la, lb = language(a), language(b)
    assert language(A.intersection(a, b)) == la & lb
    assert language(A.union(a, b)) == la | lb
    assert language(A.difference(a, b)) == la - lb
    universe = language(A.all_words(AB))
    assert language(A.complement(a)) == universe - la


@settings(max_examples=60)
@given(dfas())
def test_minimize_preserves_language_and_is_minimal(a):
    m = A.minimize(a)
    assert language(m) == language(a)
    assert m.n_states <= a.n_states + 1
    assert A.minimize(m).n_states == m.n_states
    assert A.equivalent(a, m)


def test_alphabet_mismatch():
    with pytest.raises(A.AlphabetMismatch):
        A.intersection(A.all_words("ab"), A.all_words("abc"))


@settings(max_examples=40)
@given(dfas())
def test_counts_match_listing(a):
    for n in range(6):
        listed = list(A.words(a, n))
        assert listed == sorted(listed)
        assert len(listed) == A.count_words(a, n)
        assert set(listed) == {w for w in language(a) if len(w) == n}


@settings(max_examples=40)
@given(dfas())
def test_gf_matches_counts(a):
    assert A.gf_of_dfa(a).series(10) == A.counts(a, 9)


def test_gf_all_words():
    assert A.gf_of_dfa(A.all_words("ab")) == RationalGF(1, 1 - 2 * X)


def test_weighted_gf_substitution():
    a_star = A.all_words("a")
    assert A.weighted_gf(a_star, {"a": RationalGF(X, 1 - X)}) == RationalGF(1 - X, 1 - 2 * X)


def test_weighted_gf_rejects_constant_weights():
    with pytest.raises(ValueError):
        A.weighted_gf(A.all_words("a"), {"a": RationalGF(1, 1 - X)})


@settings(max_examples=40)
@given(dfas())
def test_hom_image_and_inverse(a):
    h = {"a": "c", "b": "c"}
    image = A.hom_image(a, h).determinize()
    assert language(image, alphabet=("c",)) == {tuple("c" * len(w)) for w in language(a)}
    g = {"x": "a", "y": "b", "z": "a"}
    back = A.inverse_hom(a, g)
    for w in itertools.product("xyz", repeat=4):
        assert back.accepts(w) == a.accepts(tuple(g[c] for c in w))


@settings(max_examples=40)
@given(dfas())
def test_subword_closure(a):
    closed = A.subword_closure(a)
    la = language(a, 5)
    expected = {
        tuple(w[i] for i in idx)
        for w in la
        for k in range(len(w) + 1)
        for idx in itertools.combinations(range(len(w)), k)
    }
    got = {w for w in language(closed, 5)}
    assert expected <= got
    # w is a subword of an accepted word iff L(a) meets the superwords of w
    for n in range(5):
        for w in itertools.product(AB, repeat=n):
            superwords = A.complement(A.avoid_subwords([w], AB))
            assert closed.accepts(w) == (not A.intersection(a, superwords).is_empty())


def test_subword_closure_counts():
    aba = A.finite_language([("a", "b", "a")], AB)
    assert A.counts(A.subword_closure(aba), 4) == [1, 2, 3, 1, 0]


def test_learn_subword_closed():
    # a subword-closed language: at most one b, at most two a
    oracle = lambda w: w.count("a") <= 2 and w.count("b") <= 1
    forbidden, dfa = A.learn_subword_closed(oracle, AB, 4)
    assert sorted(forbidden) == [("a", "a", "a"), ("b", "b")]
    for n in range(7):
        for w in itertools.product(AB, repeat=n):
            assert dfa.accepts(w) == oracle(w)


def test_learn_subword_closed_rejects_non_closed():
    with pytest.raises(A.NotSubwordClosed):
        A.learn_subword_closed(lambda w: w != ("a",), AB, 3)


def test_avoid_subwords():
    dfa = A.avoid_subwords([("a", "b")], AB)
    for n in range(6):
        for w in itertools.product(AB, repeat=n):
            assert dfa.accepts(w) == (not A.is_subword(("a", "b"), w))


@settings(max_examples=30)
@given(dfas())
def test_text_round_trip(a):
    assert A.equivalent(A.from_text(A.to_text(a)), a)


def test_text_errors_carry_line_numbers():
    with pytest.raises(ValueError, match="line 1"):
        A.from_text("nonsense")
    bad = A.to_text(A.all_words("ab")).replace("0 b 0", "0 c 0")
    with pytest.raises(ValueError, match="line"):
        A.from_text(bad)


@settings(max_examples=30)
@given(dfas(max_states=5))
def test_learn_dfa_recovers_target(target):
    def cex(hyp):
        for n in range(9):
            for w in itertools.product(AB, repeat=n):
                if hyp.accepts(w) != target.accepts(w):
                    return w
        return None

    learned = A.learn_dfa(target.accepts, AB, cex)
    assert A.equivalent(learned, target)
    assert learned.n_states <= A.minimize(target).n_states
