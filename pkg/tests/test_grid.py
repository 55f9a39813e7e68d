import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permclass import automata as A
from permclass.grid import (
    CYCLE_MATRIX,
    GridMatrix,
    NotPartialMultiplication,
    decode,
    decoded_class,
    double,
    find_cycle,
    geom_class,
    geom_member,
    grid_member,
    infer_signs,
    is_forest,
    least_preimage,
    normal_form_automaton,
    parse_matrix,
    parse_word,
    format_word,
    phi,
    row_column_graph,
    simple_encoding_language,
    subclass_language,
    trace_normal_form,
    commute,
)
from permclass.perm import Perm, all_perms, avoids, contains, is_simple

CYCLE_SIGNED = GridMatrix(CYCLE_MATRIX.entries, (-1, 1, 1), (-1, 1))
SAMPLE_WORD = parse_word("a12 a32 a21 a31 a32 a12 a22")
FORESTS = [
    GridMatrix.from_rows([[1, -1]]),
    GridMatrix.from_rows([[1], [1]]),
    GridMatrix.from_rows([[1, 1], [0, -1]]),
    GridMatrix.from_rows([[-1, 1, 0], [0, 1, 1]]),
    GridMatrix.from_rows([[1, 0], [1, 1]]),
]


def words_over(m, n):
    return itertools.product(m.cells, repeat=n)


# --- files and words ------------------------------------------------------------------


def test_parse_matrix_with_signs():
    m = parse_matrix("# cycle\n-1 1 1\n 0 -1 -1\ncols: - + +\nrows: - +\n")
    assert m == CYCLE_SIGNED
    assert parse_matrix(m.to_text()) == m


@pytest.mark.parametrize(
    "text, line",
    [
        ("1 0\n1 2\n", "line 2"),
        ("1 0\n1\n", "line 2"),
        ("1 x\n", "line 1"),
        ("1\ncols: +\nrows: ?\n", "line 3"),
    ],
)
def test_parse_matrix_errors(text, line):
    with pytest.raises(ValueError, match=line):
        parse_matrix(text)


def test_signs_must_multiply():
    with pytest.raises(NotPartialMultiplication):
        parse_matrix("1 1\ncols: + -\nrows: +\n")


def test_word_formats():
    assert parse_word("1,2 3,2 2,1") == ((1, 2), (3, 2), (2, 1))
    assert parse_word("a12a32 a21") == ((1, 2), (3, 2), (2, 1))
    assert parse_word(format_word(SAMPLE_WORD)) == SAMPLE_WORD
    with pytest.raises(ValueError):
        parse_word("1;2")


# --- graph and signs --------------------------------------------------------------------------


def test_cycle_matrix_graph_has_cycle():
    g = row_column_graph(CYCLE_MATRIX)
    assert not is_forest(g)
    cycle = find_cycle(g)
    assert len(cycle) == 4
    edges = {frozenset(e) for e in g["edges"]}
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        assert frozenset((a, b)) in edges


def test_forests_are_forests():
    for m in FORESTS:
        assert is_forest(row_column_graph(m))
        assert find_cycle(row_column_graph(m)) is None


def test_infer_signs_canonical_cycle_matrix():
    # the listed signs up to a global flip, normalised so the first column is +
    assert infer_signs(CYCLE_MATRIX) == ((1, -1, -1), (1, -1))


def test_infer_signs_impossible():
    assert infer_signs(GridMatrix.from_rows([[1, 1], [1, -1]])) is None


@st.composite
def matrices(draw, max_t=3, max_u=3):
    t, u = draw(st.integers(1, max_t)), draw(st.integers(1, max_u))
    rows = [[draw(st.sampled_from([-1, 0, 0, 1])) for _ in range(t)] for _ in range(u)]
    return GridMatrix.from_rows(rows)


@given(matrices())
def test_inferred_signs_factor_entries(m):
    signs = infer_signs(m)
    if signs is None:
        return
    c, r = signs
    for k, l in m.cells:
        assert m[k, l] == c[k - 1] * r[l - 1]


@given(matrices())
def test_forest_matrices_always_have_signs(m):
    if is_forest(row_column_graph(m)):
        assert infer_signs(m) is not None


@given(matrices(2, 2))
def test_double_is_partial_multiplication(m):
    d = double(m)
    assert d.has_signs
    assert len(d.cells) == 2 * len(m.cells)


def test_doubling_keeps_the_class():
    d = double(CYCLE_MATRIX)
    for n in range(1, 6):
        assert set(geom_class(d, n)) == set(geom_class(CYCLE_MATRIX, n))


# --- decoding ---------------------------------------------------------------------------------


def test_sample_word_decodes():
    pi, psi = decode(CYCLE_SIGNED, SAMPLE_WORD)
    assert pi == Perm.parse("6327415")
    assert psi == (6, 1, 3, 7, 2, 4, 5)
    assert geom_member(CYCLE_MATRIX, pi)


def test_decode_needs_signs():
    with pytest.raises(NotPartialMultiplication):
        decode(CYCLE_MATRIX, SAMPLE_WORD)


def test_decode_rejects_empty_cell():
    with pytest.raises(ValueError):
        decode(CYCLE_SIGNED, ((1, 1),))


letters = st.sampled_from(CYCLE_SIGNED.cells)


@settings(max_examples=200)
@given(st.lists(letters, max_size=8), st.data())
def test_phi_preserves_order(word, data):
    keep = data.draw(st.lists(st.booleans(), min_size=len(word), max_size=len(word)))
    sub = [x for x, k in zip(word, keep) if k]
    assert contains(phi(CYCLE_SIGNED, word), phi(CYCLE_SIGNED, sub))


@settings(max_examples=100)
@given(st.lists(letters, max_size=8))
def test_decoded_words_are_members(word):
    pi, psi = decode(CYCLE_SIGNED, word)
    assert sorted(psi) == list(range(1, len(word) + 1))
    assert geom_member(CYCLE_MATRIX, pi)


def test_membership_matches_decoding():
    for n in range(7):
        assert set(geom_class(CYCLE_SIGNED, n)) == decoded_class(CYCLE_SIGNED, n)
    assert [len(geom_class(CYCLE_MATRIX, n)) for n in range(8)] == [1, 1, 2, 6, 24, 112, 543, 2589]


def test_sign_choice_does_not_change_the_class():
    for n in range(6):
        assert set(geom_class(CYCLE_SIGNED, n)) == set(geom_class(CYCLE_MATRIX, n))


def test_grid_and_geom_agree_on_forests():
    for m in FORESTS:
        for n in range(7):
            for p in all_perms(n):
                assert grid_member(m, p) == geom_member(m, p), (m, p)


def test_grid_exceeds_geom_on_the_cycle():
    extra = {n: [p for p in all_perms(n) if grid_member(CYCLE_MATRIX, p) and not geom_member(CYCLE_MATRIX, p)] for n in range(6)}
    assert all(not extra[n] for n in range(5))
    assert extra[5] == [Perm.parse("13542")]


def test_monotone_cells():
    inc = GridMatrix.from_rows([[1]])
    assert [len(geom_class(inc, n)) for n in range(6)] == [1] * 6
    assert geom_member(GridMatrix.from_rows([[-1]]), Perm.parse("4321"))


# --- normal forms -------------------------------------------------------------------------------


def test_commutation_rule():
    assert commute((1, 1), (2, 2))
    assert not commute((1, 1), (1, 2))
    assert not commute((1, 1), (2, 1))
    assert not commute((1, 1), (1, 1))


def commutation_class(w):
    seen = {w}
    todo = [w]
    while todo:
        v = todo.pop()
        for i in range(len(v) - 1):
            if commute(v[i], v[i + 1]):
                u = v[:i] + (v[i + 1], v[i]) + v[i + 2 :]
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
    return seen


@settings(max_examples=100)
@given(st.lists(letters, max_size=6))
def test_commuting_letters_draw_the_same_permutation(word):
    word = tuple(word)
    assert {phi(CYCLE_SIGNED, v) for v in commutation_class(word)} == {phi(CYCLE_SIGNED, word)}


def test_trace_normal_form_brute_force():
    cells = CYCLE_MATRIX.cells
    dfa = trace_normal_form(cells)
    for n in range(5):
        for w in itertools.product(cells, repeat=n):
            assert dfa.accepts(w) == (w == min(commutation_class(w)))


def test_least_preimage_brute_force():
    m = CYCLE_SIGNED
    best = {}
    for n in range(6):
        for w in words_over(m, n):
            p = phi(m, w)
            if p not in best or w < best[p]:
                best[p] = w
    for p, w in best.items():
        assert least_preimage(m, p) == w
    assert least_preimage(m, Perm.parse("13542")) is None


@pytest.fixture(scope="module")
def cycle_normal_form():
    return normal_form_automaton(CYCLE_MATRIX, 7)


def test_normal_form_certified(cycle_normal_form):
    nf = cycle_normal_form
    assert nf.certified_to == 7
    assert list(nf.class_counts) == [1, 1, 2, 6, 24, 112, 543, 2589]
    assert A.counts(nf.dfa, 7) == list(nf.class_counts)


def test_normal_form_is_bijective(cycle_normal_form):
    nf = cycle_normal_form
    m = nf.matrix
    for n in range(7):
        images = [phi(m, w) for w in A.words(nf.dfa, n)]
        assert len(images) == len(set(images))
        assert set(images) == set(geom_class(CYCLE_MATRIX, n))


def test_normal_form_beyond_certification(cycle_normal_form):
    # the learned automaton keeps matching the exact least preimages past its certificate
    from permclass.grid import least_preimages

    nf = cycle_normal_form
    assert set(A.words(nf.dfa, 8)) == set(least_preimages(nf.matrix, 8).values())


def test_normal_form_forest():
    m = GridMatrix.from_rows([[1, 1], [0, -1]])
    nf = normal_form_automaton(m, 6)
    for n in range(7):
        assert A.count_words(nf.dfa, n) == len(geom_class(m, n))


# --- subclasses and simples -------------------------------------------------------------------------


def test_subclass_single_cell():
    lang = subclass_language(GridMatrix.from_rows([[1]]), [Perm.parse("123")], 5)
    assert lang.certified
    assert list(lang.forbidden) == [((1, 1),) * 3]
    assert A.counts(lang.dfa, 6) == [1, 1, 1, 0, 0, 0, 0]


def test_subclass_of_cycle_matrix():
    basis = [Perm.parse("12345")]
    lang = subclass_language(CYCLE_MATRIX, basis, 6)
    assert lang.certified
    brute = [sum(1 for p in geom_class(CYCLE_MATRIX, n) if avoids(p, basis)) for n in range(8)]
    assert A.counts(lang.dfa, 7) == brute


def test_simple_encoding_language():
    dfa = simple_encoding_language(CYCLE_MATRIX, 6)
    assert dfa.is_finite()
    expected = [sum(1 for p in geom_class(CYCLE_MATRIX, n) if n >= 2 and is_simple(p)) for n in range(7)]
    assert A.counts(dfa, 6) == expected
    for n in range(7):
        images = [phi(CYCLE_MATRIX.with_signs(), w) for w in A.words(dfa, n)]
        assert len(images) == len(set(images))
