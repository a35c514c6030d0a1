import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from soficlab.core import ShiftHandle, higher_block
from soficlab.corpus import IRREDUCIBLE, graph, shift
from soficlab.presentation import (NOT_IN_LANGUAGE, determinize, find_magic_word, fischer_cover,
                                   isomorphic, is_magic, is_synchronizing, left_fischer_cover,
                                   shifts_equal)
from soficlab.verify import refute_synchronizing

from conftest import irreducible_graphs
from oracles import language, synchronizing_refuted, triples_of


# -- subset construction -------------------------------------------------------------

def test_determinize_starts_at_full_set():
    g = graph("even")
    D = determinize(g)
    assert D.states[0] == frozenset(range(g.n))


def test_determinize_golden_even_zero_keeps_two_vertices():
    D = determinize(graph("golden_even"))
    assert len(D.image(("0",))) >= 2


def test_determinize_full_shift():
    D = determinize(graph("full2"))
    assert len(D.states) == 1
    assert D.trans == {(0, "0"): 0, (0, "1"): 0}


@given(irreducible_graphs())
def test_subset_run_matches_language(g):
    D = determinize(g)
    words = language(triples_of(g), 4)
    for n in range(5):
        for w in {tuple(x) for x in itertools.product(g.alphabet, repeat=n)}:
            assert (D.run(w) is not None) == (w in words)


# -- Fischer covers -------------------------------------------------------------------------

def test_even_cover_two_states():
    F = fischer_cover(shift("even"))
    assert F.n == 2 and isomorphic(F.graph, graph("even"))


def test_g1_right_cover_is_target_labeling():
    assert isomorphic(fischer_cover(shift("g1")).graph, graph("g1_target"))


def test_golden_sft_cover():
    F = fischer_cover(shift("golden_sft"))
    assert F.n == 2 and F.graph.is_right_resolving()


def test_left_cover_g2():
    assert isomorphic(left_fischer_cover(shift("g1")).graph, graph("g2"))


def test_left_cover_even():
    assert left_fischer_cover(shift("even")).n == 2


def test_symmetric_language_equal_state_counts():
    Y = shift("golden")  # 1 never twice in a row reads the same backwards
    assert fischer_cover(Y).n == left_fischer_cover(Y).n


@pytest.mark.parametrize("name", IRREDUCIBLE)
def test_cover_presents_same_shift(name):
    Y = shift(name)
    F = fischer_cover(Y)
    assert F.graph.is_right_resolving()
    assert language(triples_of(F.graph), 6) == language(triples_of(Y.presentation), 6)


@pytest.mark.parametrize("name", IRREDUCIBLE)
def test_fischer_idempotent(name):
    F = fischer_cover(shift(name))
    assert isomorphic(fischer_cover(ShiftHandle.of(F.graph)).graph, F.graph)


@given(irreducible_graphs())
def test_fischer_property(g):
    Y = ShiftHandle.of(g)
    F = fischer_cover(Y)
    assert F.graph.is_right_resolving()
    assert language(triples_of(F.graph), 5) == language(triples_of(g), 5)
    assert F.n <= 2 ** g.n


@given(irreducible_graphs())
def test_left_cover_is_left_resolving(g):
    L = left_fischer_cover(ShiftHandle.of(g))
    assert L.graph.is_left_resolving()
    assert language(triples_of(L.graph), 5) == language(triples_of(g), 5)


# -- magic and synchronizing words --------------------------------------------------------

def test_even_one_is_magic():
    assert bool(is_magic(fischer_cover(shift("even")), "1"))


def test_even_zero_not_magic():
    m = is_magic(fischer_cover(shift("even")), "0")
    assert not m and m.flag is None


def test_not_in_language_flag():
    m = is_magic(fischer_cover(shift("golden")), "11")
    assert not m and m.flag == NOT_IN_LANGUAGE


def test_golden_even_one_synchronizing():
    assert bool(is_synchronizing(shift("golden_even"), "1"))


@pytest.mark.parametrize("u,v", [("", "0"), ("0", ""), ("00", "1"), ("1", "00")])
def test_extensions_of_synchronizing_word(u, v):
    Y = shift("even")
    w = u + "1" + v
    assert bool(is_synchronizing(Y, w))


@pytest.mark.parametrize("name", ["even", "golden", "golden_even", "g1", "ex_5_4", "aab"])
def test_magic_word_not_refuted(name):
    Y = shift(name)
    m = find_magic_word(fischer_cover(Y))
    assert refute_synchronizing(Y, m, 3) is None
    assert not synchronizing_refuted(triples_of(Y.presentation), m, 3)


@given(irreducible_graphs(max_vertices=3), st.lists(st.sampled_from("01"), min_size=1, max_size=3))
def test_synchronizing_never_refuted(g, w):
    Y = ShiftHandle.of(g)
    w = tuple(w)
    if is_synchronizing(Y, w):
        assert not synchronizing_refuted(triples_of(g), w, 3)


# -- equality ----------------------------------------------------------------------------------

def test_even_equals_higher_block():
    even = shift("even")
    h, _ = higher_block(even.presentation, 1)
    assert shifts_equal(even, ShiftHandle.of(h))


def test_even_not_golden():
    assert not shifts_equal(shift("even"), shift("golden"))


@given(irreducible_graphs(max_vertices=3), irreducible_graphs(max_vertices=3))
def test_equality_agrees_with_bounded_languages(g, h):
    same = shifts_equal(ShiftHandle.of(g), ShiftHandle.of(h))
    assert same == shifts_equal(ShiftHandle.of(h), ShiftHandle.of(g))
    if same:
        assert language(triples_of(g), 6) == language(triples_of(h), 6)
    if language(triples_of(g), 6) != language(triples_of(h), 6):
        assert not same


@given(irreducible_graphs(max_vertices=3), st.integers(1, 2))
def test_equal_to_own_recoding(g, m):
    h, _ = higher_block(g, m)
    assert shifts_equal(ShiftHandle.of(g), ShiftHandle.of(h))
