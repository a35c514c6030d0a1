import pytest
from hypothesis import given

from soficlab.census import census
from soficlab.core import LabeledGraph, ShiftHandle, lyndon_words, orbit_shift
from soficlab.corpus import IRREDUCIBLE, shift
from soficlab.errors import DepthBudgetExceeded, NotContainedError
from soficlab.presentation import shifts_equal
from soficlab.structure import (closure_of_periodic, component_tree, derived_shift, language_included,
                                locate_component, locating_components, meets_magic)

from conftest import irreducible_graphs
from oracles import language, periodic_in, q_count, triples_of


# -- derived shifts -----------------------------------------------------------------

@pytest.mark.parametrize("name,orbit", [
    ("even", "0"),
    ("golden_even", "0"),
    ("aab", "a"),
    ("g1", "a"),
    ("ex_5_4", "ab"),
])
def test_derived_shift_is_one_orbit(name, orbit):
    d = derived_shift(shift(name))
    assert shifts_equal(d, orbit_shift([orbit]))


@pytest.mark.parametrize("name", ["golden", "full2", "golden_sft"])
def test_sft_derived_shift_empty(name):
    assert derived_shift(shift(name)).is_empty


def test_derived_of_empty_is_empty():
    assert derived_shift(ShiftHandle.empty()).is_empty


@given(irreducible_graphs())
def test_derived_points_are_the_unsynchronized_ones(g):
    Y = ShiftHandle.of(g)
    d = derived_shift(Y)
    t = census(Y, 6)
    for n in range(1, 7):
        dq = 0 if d.is_empty else q_count(triples_of(d.presentation), n, g.alphabet)
        assert dq == t.q[n] - t.s[n]


@given(irreducible_graphs())
def test_derived_language_inside(g):
    d = derived_shift(ShiftHandle.of(g))
    if not d.is_empty:
        assert language(triples_of(d.presentation), 5) <= language(triples_of(g), 5)


# -- closures ---------------------------------------------------------------------------

def test_closure_splits_two_fixed_points():
    pieces = closure_of_periodic(shift("points01"))
    assert len(pieces) == 2
    assert {frozenset(e.label for e in p.presentation.edges) for p in pieces} == {frozenset("0"), frozenset("1")}


def test_closure_merges_duplicates():
    g = LabeledGraph.build([("a", "a", "0"), ("b", "b", "0"), ("a", "b", "1")])
    assert len(closure_of_periodic(ShiftHandle.of(g))) == 1


def test_closure_of_empty():
    assert closure_of_periodic(ShiftHandle.empty()) == []


# -- component tree ---------------------------------------------------------------------

@pytest.mark.parametrize("name,depth,count", [
    ("even", 1, 2), ("golden", 0, 1), ("full2", 0, 1), ("g1", 1, 2), ("ex_5_4", 1, 2),
])
def test_tree_shape(name, depth, count):
    t = component_tree(shift(name))
    assert t.depth == depth and len(t.components) == count


def test_tree_depth_budget():
    with pytest.raises(DepthBudgetExceeded):
        component_tree(shift("even"), depth_max=0)


def test_tree_serializes():
    d = component_tree(shift("even")).to_dict()
    assert d["depth"] == 1 and d["components"][1]["parent"] == 0
    assert d["components"][1]["entropy"]["zero"]


@given(irreducible_graphs(max_vertices=3))
def test_tree_parents_contain_children(g):
    t = component_tree(ShiftHandle.of(g))
    for c in t.components[1:]:
        parent = t.components[c.parent]
        assert c.level == parent.level + 1
        assert language_included(c.closure, parent.closure)


# -- locating orbits -------------------------------------------------------------------

@pytest.mark.parametrize("w,index", [("0", 1), ("1", 0), ("001", 0), ("00001", 0)])
def test_locate_orbits_in_even(w, index):
    t = component_tree(shift("even"))
    U = orbit_shift([w])
    assert locate_component(U, t).index == index
    assert len(locating_components(U, t)) == 1


def test_locate_outside_root():
    with pytest.raises(NotContainedError):
        locate_component(orbit_shift(["01"]), component_tree(shift("even")))


@pytest.mark.parametrize("name", [n for n in IRREDUCIBLE if n not in ("g1", "g2")])
def test_locate_unique_for_short_orbits(name):
    Y = shift(name)
    t = component_tree(Y)
    tri = triples_of(Y.presentation)
    for n in range(1, 5):
        for w in lyndon_words(Y.presentation.alphabet, n):
            if periodic_in(tri, w):
                assert len(locating_components(orbit_shift([w], Y.presentation.alphabet), t)) == 1


def test_language_inclusion():
    assert language_included(orbit_shift(["0"]), shift("even"))
    assert not language_included(shift("full2"), shift("even"))
    assert language_included(ShiftHandle.empty(), shift("even"))


def test_meets_magic():
    assert meets_magic(orbit_shift(["1"]), shift("even"))
    assert not meets_magic(orbit_shift(["0"]), shift("even"))
