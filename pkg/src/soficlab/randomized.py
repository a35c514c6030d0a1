"""Seeded random presentations for property checks and the soundness audit."""

from __future__ import annotations

import random

from .core import LabeledGraph, ShiftHandle, is_irreducible


def random_irreducible_graph(rng: random.Random, n_max: int = 6, alphabet=("0", "1"),
                             extra: int | None = None) -> LabeledGraph:
    """An irreducible labeled graph: a Hamiltonian cycle plus random chords.

    The cycle guarantees strong connectivity; chords and labels are drawn
    from ``rng`` so the result depends only on the seed.
    """
    n = rng.randint(1, n_max)
    order = list(range(n))
    rng.shuffle(order)
    triples = [(f"v{order[i]}", f"v{order[(i + 1) % n]}", rng.choice(alphabet)) for i in range(n)]
    k = rng.randint(1, n + 1) if extra is None else extra
    for _ in range(k):
        triples.append((f"v{rng.randrange(n)}", f"v{rng.randrange(n)}", rng.choice(alphabet)))
    g = LabeledGraph.build(triples, alphabet=alphabet, vertices=[f"v{i}" for i in range(n)])
    assert is_irreducible(g)
    return g


def random_periodic_shift(rng: random.Random, alphabet=("0", "1"), orbits: int = 2, n_max: int = 4) -> ShiftHandle:
    """A finite shift made of a few random periodic orbits."""
    from .core import least_period, orbit_shift
    words = []
    for _ in range(rng.randint(1, orbits)):
        n = rng.randint(1, n_max)
        w = tuple(rng.choice(alphabet) for _ in range(n))
        words.append(w[:least_period(w)])
    return orbit_shift(words, alphabet, "orbits")


def random_pairs(seed: int, count: int):
    """Seed-fixed (kind, Z, target) triples covering every decision procedure."""
    from .core import CoverSpec
    rng = random.Random(seed)
    kinds = ["s-fact", "factorizable", "through-cover", "sft-embed"]
    out = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        if rng.random() < 0.5:
            Z = random_periodic_shift(rng)
        else:
            Z = ShiftHandle.of(random_irreducible_graph(rng, 3), f"Z{i}")
        g = random_irreducible_graph(rng, 4)
        if kind == "through-cover":
            target = CoverSpec(g, f"pi{i}")
        elif kind == "sft-embed":
            target = ShiftHandle.of(g.relabel(lambda e: f"e{e.id}", [f"e{e.id}" for e in g.edges]), f"W{i}")
        else:
            target = ShiftHandle.of(g, f"Y{i}")
        out.append((kind, Z, target))
    return out
