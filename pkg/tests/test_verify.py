import copy

import pytest
from hypothesis import given, settings

from soficlab.core import CoverSpec, LabeledGraph, ShiftHandle
from soficlab.corpus import graph, shift
from soficlab.decide import decide_s_factorizable
from soficlab.errors import NotFiniteToOne
from soficlab.presentation import fischer_cover
from soficlab.verify import (audit_verdict, brute_edge_q, brute_language, brute_q, brute_r, degree,
                             fiber_product, finite_to_one, in_language, preimage_count,
                             refute_synchronizing, replay_rec, same_language)

from conftest import irreducible_graphs
from oracles import (closed_walk_count, edge_shift_q, injective_label_map, language, q_count, r_count,
                     triples_of)

DOUBLE = LabeledGraph.build([("A", "B", "0"), ("B", "A", "0"), ("A", "A", "1"), ("B", "B", "1")])
DIAMOND = LabeledGraph.build([("A", "B", "0"), ("A", "C", "0"), ("B", "D", "1"), ("C", "D", "1"),
                              ("D", "A", "0")])


def brute_degree(g, L=5):
    """Least number of edges seen at one position over all paths labeled by some word."""
    best = None
    paths = [[e] for e in g.edges]
    for _ in range(L - 1):
        paths = [p + [e] for p in paths for e in g.edges if e.src == p[-1].dst]
    by_word = {}
    for p in paths:
        by_word.setdefault(tuple(e.label for e in p), []).append(p)
    for ps in by_word.values():
        for i in range(L):
            c = len({p[i].id for p in ps})
            best = c if best is None else min(best, c)
    return best


# -- language and counting oracles ---------------------------------------------------

@given(irreducible_graphs())
def test_brute_language_matches_oracle(g):
    assert brute_language(g, 5) == language(triples_of(g), 5)


@given(irreducible_graphs())
def test_brute_counts_match_oracles(g):
    tri = triples_of(g)
    for m in range(1, 6):
        assert brute_q(ShiftHandle.of(g), m) == q_count(tri, m)
        assert brute_r(g, m) == r_count(tri, m)
        assert brute_edge_q(g, m) == edge_shift_q(tri, m)


@given(irreducible_graphs())
def test_preimage_count_is_closed_walks(g):
    for w in [("0",), ("1",), ("0", "1"), ("0", "0", "1")]:
        assert preimage_count(g, w) == closed_walk_count(triples_of(g), w)


def test_in_language():
    even = graph("even")
    assert in_language(even, ("0", "0", "1"))
    assert not in_language(even, ("1", "0", "1"))


def test_replay_rec_even():
    assert [replay_rec(shift("even"), m) for m in range(1, 6)] == [1, 0, 3, 4, 10]


# -- synchronizing refutation -------------------------------------------------------------

def test_refute_zero_in_even():
    a, b = refute_synchronizing(shift("even"), "0", 2)
    assert not in_language(graph("even"), a + ("0",) + b)


def test_cannot_refute_magic_word():
    assert refute_synchronizing(shift("even"), "1", 3) is None


# -- fiber products, finite-to-one, degree ---------------------------------------------------

def test_fiber_product_of_injective_cover():
    g = graph("golden_sft")
    assert not fiber_product(g).off_diagonal_edges()


def test_fiber_product_of_double_cover():
    assert fiber_product(DOUBLE).off_diagonal_edges()


@given(irreducible_graphs())
def test_fiber_product_injectivity_matches_oracle(g):
    assert (not fiber_product(g).off_diagonal_edges()) == injective_label_map(triples_of(g))


def test_diamond_detected():
    assert not finite_to_one(DIAMOND)
    with pytest.raises(NotFiniteToOne):
        degree(CoverSpec(DIAMOND))


@pytest.mark.parametrize("g,d", [
    (DOUBLE, 2),
    (fischer_cover(shift("even")).graph, 1),
    (graph("golden_sft"), 1),
    (graph("g1_target"), 1),
])
def test_degree_examples(g, d):
    assert degree(CoverSpec(g)) == d == brute_degree(g)


@given(irreducible_graphs(max_vertices=3, max_chords=3))
def test_degree_of_right_resolving_against_brute(g):
    if g.is_right_resolving() and finite_to_one(g):
        assert degree(CoverSpec(g)) <= brute_degree(g, 5)


@given(irreducible_graphs(max_vertices=3))
def test_fischer_cover_has_degree_one(g):
    F = fischer_cover(ShiftHandle.of(g)).graph
    assert degree(CoverSpec(F)) == 1


# -- language equality of presentations --------------------------------------------------------

@given(irreducible_graphs(max_vertices=3))
def test_same_language_recodings(g):
    assert same_language(g, fischer_cover(ShiftHandle.of(g)).graph)


def test_different_languages():
    assert not same_language(graph("even"), graph("golden"))


# -- audits ------------------------------------------------------------------------------------

def test_audit_accepts_true_witness():
    Z, Y = shift("point0"), shift("golden_even")
    v = decide_s_factorizable(Z, Y, 8)
    assert audit_verdict(v, Z, "s-fact", Y)["ok"]


@pytest.mark.parametrize("field,value", [("q", 5), ("rhs", 7), ("n", 2)])
def test_audit_rejects_tampered_witness(field, value):
    Z, Y = shift("point0"), shift("golden_even")
    d = decide_s_factorizable(Z, Y, 8).to_dict()
    d["witness"][field] = value
    assert not audit_verdict(d, Z, "s-fact", Y)["ok"]


def test_audit_rejects_tampered_tail():
    Z, Y = shift("even"), shift("full2")
    good = decide_s_factorizable(Z, Y, 8).to_dict()
    assert audit_verdict(good, Z, "s-fact", Y)["ok"]
    d = copy.deepcopy(good)
    d["certificate"]["counts"]["tail"]["crossover"] = 2
    assert not audit_verdict(d, Z, "s-fact", Y)["ok"]


def test_unknown_needs_no_replay():
    r = audit_verdict({"verdict": "UNKNOWN", "witness": None, "certificate": None}, shift("even"),
                      "s-fact", shift("full2"))
    assert r == {"verdict": "UNKNOWN", "replayed": False, "ok": True}
