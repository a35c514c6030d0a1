import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from soficlab.core import LabeledGraph, ShiftHandle
from soficlab.corpus import shift

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def irreducible_graphs(draw, max_vertices=4, alphabet=("0", "1"), max_chords=4):
    """A Hamiltonian cycle plus chords, so the result is always irreducible."""
    n = draw(st.integers(1, max_vertices))
    order = draw(st.permutations(list(range(n))))
    triples = [(f"v{order[i]}", f"v{order[(i + 1) % n]}", draw(st.sampled_from(alphabet)))
               for i in range(n)]
    for _ in range(draw(st.integers(0, max_chords))):
        triples.append((f"v{draw(st.integers(0, n - 1))}", f"v{draw(st.integers(0, n - 1))}",
                        draw(st.sampled_from(alphabet))))
    return LabeledGraph.build(triples, alphabet=alphabet, vertices=[f"v{i}" for i in range(n)])


@pytest.fixture
def even():
    return shift("even")


@pytest.fixture
def golden_even():
    return shift("golden_even")


@pytest.fixture
def g1():
    return shift("g1")


@pytest.fixture
def rng():
    return random.Random(12345)


def edge_shift(g: LabeledGraph) -> ShiftHandle:
    return ShiftHandle.of(g.relabel(lambda e: f"e{e.id}", [f"e{e.id}" for e in g.edges]))
