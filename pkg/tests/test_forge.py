import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soficlab.census import entropy, graph_entropy, is_receptive
from soficlab.core import CoverSpec, graph_period, is_irreducible, lyndon_words
from soficlab.corpus import shift
from soficlab.errors import NotReceptiveError, PreconditionError, ZeroEntropyError
from soficlab.forge import (ai_sft_cover, enlarge_with_orbit, extract_injective_sub, find_labeled_path,
                            forge_ai_cover, forge_receptive_cover, grow_periodic_support)
from soficlab.presentation import fischer_cover
from soficlab.verify import SubSFT, degree, injective_on

from conftest import irreducible_graphs
from oracles import closed_walk_count, edge_shift_q, injective_label_map, language, r_count, triples_of


def fischer_spec(name):
    return CoverSpec(fischer_cover(shift(name)).graph, name)


# -- labeled paths --------------------------------------------------------------------

def test_find_labeled_path_follows_word():
    g = fischer_cover(shift("even")).graph
    path = find_labeled_path(g, ("0", "0", "1"))
    assert [g.edges[i].label for i in path] == ["0", "0", "1"]
    assert all(g.edges[a].dst == g.edges[b].src for a, b in zip(path, path[1:]))


def test_find_labeled_path_missing_word():
    assert find_labeled_path(fischer_cover(shift("even")).graph, ("1", "0", "1")) is None


# -- receptive covers ---------------------------------------------------------------------

@pytest.mark.parametrize("name,w", [("even", "1"), ("g1", "a"), ("ex_5_4", "ab")])
def test_receptive_cover(name, w):
    pi = fischer_spec(name)
    res = forge_receptive_cover(pi, w)
    g = res.graph
    assert language(triples_of(g), 7) == language(triples_of(pi.graph), 7)
    word = tuple(w) if name != "g1" else ("a",)
    assert closed_walk_count(triples_of(g), word) >= 1
    assert graph_period(g) == graph_period(pi.graph)
    assert all(res.validation[k] for k in res.validation if k != "graph_period")


@pytest.mark.parametrize("name,w", [("even", "0"), ("even", "011"), ("golden_even", "1")])
def test_receptive_cover_refuses(name, w):
    with pytest.raises(NotReceptiveError):
        forge_receptive_cover(fischer_spec(name), w)


def test_receptive_cover_needs_primitive():
    with pytest.raises(PreconditionError):
        forge_receptive_cover(fischer_spec("even"), "11")


@settings(max_examples=25)
@given(irreducible_graphs(max_vertices=3), st.integers(1, 3))
def test_receptive_cover_property(g, n):
    pi = CoverSpec(g)
    for w in lyndon_words(g.alphabet, n):
        if is_receptive(pi.codomain, w)[0]:
            h = forge_receptive_cover(pi, w).graph
            assert language(triples_of(h), 6) == language(triples_of(g), 6)
            assert closed_walk_count(triples_of(h), w) >= 1
            break


# -- almost-invertible covers ----------------------------------------------------------------

@pytest.mark.parametrize("name,xi", [("even", "1"), ("g1", "a"), ("ex_5_4", "ab"),
                                     ("full2", "0"), ("golden", "0")])
def test_ai_sft_cover(name, xi):
    Y = shift(name)
    res = ai_sft_cover(Y, xi)
    g = res.graph
    assert is_irreducible(g) and degree(CoverSpec(g)) == 1
    word = tuple(xi) if name != "g1" else ("a",)
    # xi need not be doubly transitive, so only a lift of its own period is promised
    assert closed_walk_count(triples_of(g), word) >= 1
    assert language(triples_of(g), 6) == language(triples_of(Y.presentation), 6)
    assert graph_period(g) % graph_period(fischer_cover(Y).graph) == 0


@pytest.mark.parametrize("name,xi", [("even", "1"), ("g1", "a"), ("full2", "0")])
def test_ai_cover_unique_lift_when_magic(name, xi):
    g = ai_sft_cover(shift(name), xi).graph
    assert closed_walk_count(triples_of(g), (xi,)) == 1


def test_ex_5_4_orbit_keeps_unhatted_lifts():
    # (ab)^inf already has two lifts in the Fischer cover; the hatted copy is a third
    g = ai_sft_cover(shift("ex_5_4"), "ab").graph
    assert closed_walk_count(triples_of(g), ("a", "b")) == 3


def test_ai_cover_degree_one_points_unique():
    Y = shift("even")
    g = ai_sft_cover(Y, "1").graph
    F = fischer_cover(Y).graph
    for n in range(1, 6):
        for w in lyndon_words(("0", "1"), n):
            if closed_walk_count(triples_of(F), w):
                assert closed_walk_count(triples_of(g), w) == 1


def test_ai_cover_zero_entropy():
    with pytest.raises(ZeroEntropyError):
        forge_ai_cover(shift("cycle2"), "01")


def test_ai_cover_not_receptive():
    with pytest.raises(NotReceptiveError):
        forge_ai_cover(shift("even"), "0")


# -- injective sub-SFTs -----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["even", "ex_5_4", "full2"])
def test_injective_sub(name):
    pi = fischer_spec(name)
    W = extract_injective_sub(pi, 0.3).cover
    assert injective_on(pi, W)
    assert injective_label_map(triples_of(W.graph))
    assert graph_entropy(W.graph).lower >= entropy(pi.codomain).upper - 0.3
    assert graph_period(W.graph) == graph_period(pi.graph)
    for k, e in enumerate(W.graph.edges):
        assert pi.graph.edges[W.edge_map[k]].label == e.label


def test_injective_sub_eps_range():
    with pytest.raises(PreconditionError):
        extract_injective_sub(fischer_spec("golden_even"), 0.3)
    with pytest.raises(PreconditionError):
        extract_injective_sub(fischer_spec("even"), 0)


def test_whole_even_cover_not_injective():
    pi = fischer_spec("even")
    assert not injective_on(pi, SubSFT.whole(pi))
    assert not injective_label_map(triples_of(pi.graph))


# -- growing periodic support ------------------------------------------------------------------

@pytest.mark.parametrize("name,M", [("even", 3), ("full2", 3), ("ex_5_4", 3)])
def test_grow_matches_cover_counts(name, M):
    pi = fischer_spec(name)
    res = grow_periodic_support(pi, 0.3, M)
    W = res.cover
    assert injective_label_map(triples_of(W.graph))
    p = graph_period(pi.graph)
    for n in range(1, M + 1):
        assert edge_shift_q(triples_of(W.graph), n * p) == r_count(triples_of(pi.graph), n * p)


def test_enlarge_adds_fixed_point():
    pi = fischer_spec("even")
    W = extract_injective_sub(pi, 0.3).cover
    loop = next(e.id for e in pi.graph.edges if e.src == e.dst)
    W2 = enlarge_with_orbit(pi, W, [loop]).cover
    assert injective_label_map(triples_of(W2.graph))
    assert closed_walk_count(triples_of(W2.graph), ("1",)) == 1
    with pytest.raises(PreconditionError):
        enlarge_with_orbit(pi, W2, [loop])


def test_enlarge_needs_cycle():
    pi = fischer_spec("even")
    W = extract_injective_sub(pi, 0.3).cover
    a = next(e.id for e in pi.graph.edges if e.src != e.dst)
    with pytest.raises(PreconditionError):
        enlarge_with_orbit(pi, W, [a])
