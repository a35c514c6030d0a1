import pytest
from hypothesis import given
from hypothesis import strategies as st

from soficlab.core import CoverSpec, ShiftHandle, as_word, cycle_graph
from soficlab.corpus import IRREDUCIBLE, graph, shift
from soficlab.errors import NotIrreducibleError
from soficlab.period import (block_words, canonical_cyclic_partition, cyclic_images, is_p_periodic,
                             period_of, periodic_obstruction_holds, power_graph, window_coloring)
from soficlab.presentation import fischer_cover

from conftest import edge_shift, irreducible_graphs
from oracles import cycle_gcd, periodic_in, q_count, triples_of, words_of_length


# -- period of a shift -------------------------------------------------------------

@pytest.mark.parametrize("name,per", [
    ("ex_5_4", 2), ("even", 1), ("aab", 2), ("golden_even", 1), ("full2", 1),
    ("cycle2", 2), ("orbit100", 3), ("point0", 1),
])
def test_period_examples(name, per):
    r = period_of(shift(name))
    assert r.per == per == r.p3_left and r.consistent


def test_aab_census_gcd_differs_from_period():
    # the fixed point a^inf is not receptive, so the raw census gcd drops to 1
    r = period_of(shift("aab"))
    assert r.per == 2 and r.q_gcd == 1 and r.p4_empirical == 2


def test_period_needs_irreducible():
    with pytest.raises(NotIrreducibleError):
        period_of(shift("points01"))


@given(irreducible_graphs())
def test_period_divides_receptive_periods(g):
    r = period_of(ShiftHandle.of(g), n_max=6)
    assert r.consistent
    assert cycle_gcd(triples_of(fischer_cover(ShiftHandle.of(g)).graph)) == r.per


# -- cyclic partitions -------------------------------------------------------------------

def test_partition_ex_5_4():
    part = canonical_cyclic_partition(graph("ex_5_4"))
    assert part.p == 2
    assert sorted(len(part.members(i)) for i in range(2)) == [2, 2]


@given(irreducible_graphs(max_vertices=5))
def test_partition_edges_step_by_one(g):
    part = canonical_cyclic_partition(g)
    assert part.p == cycle_gcd(triples_of(g))
    for e in g.edges:
        assert (part.classes[e.src] + 1) % part.p == part.classes[e.dst]


def test_cyclic_images_rotate():
    imgs = cyclic_images(CoverSpec(graph("ex_5_4")))
    assert len(imgs) == 2
    labels = [sorted({e.label for e in h.presentation.edges}) for h in imgs]
    assert labels == [["ab", "ac", "ba", "bc"], ["ab", "ba", "ca", "cb"]]


@given(irreducible_graphs(max_vertices=4, max_chords=3))
def test_power_graph_words_are_blocks(g):
    part = canonical_cyclic_partition(g)
    p = part.p
    h = power_graph(g, p, part.members(0))
    blocks = words_of_length(triples_of(g), p)
    for e in h.edges:
        assert as_word(e.label, g.alphabet) in blocks


# -- p-periodicity -------------------------------------------------------------------------

@pytest.mark.parametrize("name,p,verdict", [
    ("cycle2", 2, "YES"), ("cycle2", 3, "NO"),
    ("orbit100", 3, "YES"), ("orbit100", 2, "NO"),
    ("even", 2, "NO"), ("aab", 2, "NO"), ("golden_sft", 2, "NO"),
    ("ex_5_4", 3, "NO"), ("full2", 1, "YES"),
])
def test_p_periodic_examples(name, p, verdict):
    assert is_p_periodic(shift(name), p).verdict == verdict


def test_ex_5_4_two_periodic_left_open():
    # the sofic side of this example has no small window coloring and no short obstruction
    v = is_p_periodic(shift("ex_5_4"), 2)
    assert v.verdict == "UNKNOWN" and v.checked_up_to == 8


def test_edge_shift_of_ex_5_4_is_two_periodic():
    v = is_p_periodic(edge_shift(graph("ex_5_4")), 2)
    assert v.verdict == "YES" and v.certificate.kind == "SFT_EXACT"


def test_obstruction_point_replays():
    v = is_p_periodic(shift("even"), 2)
    assert v.witness["kind"] == "PERIOD_OBSTRUCTION"
    assert periodic_obstruction_holds(shift("even"), v.witness["point"])


def test_p_must_be_positive():
    with pytest.raises(ValueError):
        is_p_periodic(shift("even"), 0)


@pytest.mark.parametrize("w,p", [("0011", 2), ("0011", 4), ("011", 3)])
def test_cycles_periodic_for_divisors(w, p):
    Y = ShiftHandle.of(cycle_graph(tuple(w)))
    assert is_p_periodic(Y, p).verdict == "YES"


def _coloring_ok(Z, p, k, col):
    for w in block_words(Z, 2 * k + 2):
        a, b = "".join(w[:-1]), "".join(w[1:])
        if (col[a] + 1) % p != col[b]:
            return False
    return True


@given(irreducible_graphs(max_vertices=4), st.integers(2, 4))
def test_p_periodic_verdicts_replay(g, p):
    Y = ShiftHandle.of(g)
    v = is_p_periodic(Y, p, k_max=2, n_max=6)
    tri = triples_of(g)
    if v.verdict == "NO":
        w = v.witness
        if "point" in w:
            word = as_word(w["point"], g.alphabet)
            assert periodic_in(tri, word) and len(word) % p
    elif v.verdict == "YES":
        # a p-periodic shift has no point whose least period is prime to p's multiples
        assert all(q_count(tri, n) == 0 for n in range(1, 7) if n % p)
        c = v.certificate
        if c.kind == "SFT_EXACT":
            F = fischer_cover(Y).graph
            for e in F.edges:
                assert (c.data["coloring"][e.src] + 1) % p == c.data["coloring"][e.dst]
        elif c.kind == "WINDOW_COLORING":
            assert _coloring_ok(Y, p, c.data["k"], c.data["coloring"])


@given(irreducible_graphs(max_vertices=4), st.integers(2, 3))
def test_window_coloring_replays(g, p):
    Y = ShiftHandle.of(g)
    col, _ = window_coloring(Y, p, 1)
    if col is not None:
        assert _coloring_ok(Y, p, 1, col)
