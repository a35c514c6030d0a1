"""Brute-force reference implementations used as test oracles.

Everything here works on plain edge triples (src, dst, label) and avoids the
package's own algorithms, so agreement is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce


def triples_of(g) -> list:
    return [(e.src, e.dst, e.label) for e in g.edges]


def essential(triples) -> list:
    """Repeatedly drop edges whose source has no incoming or target no outgoing edge."""
    T = list(triples)
    while True:
        has_in = {d for _, d, _ in T}
        has_out = {s for s, _, _ in T}
        keep = [t for t in T if t[0] in has_in and t[1] in has_out]
        if len(keep) == len(T):
            return keep
        T = keep


def words_of_length(triples, n: int) -> set:
    """Label words of length n read along paths of the essential graph."""
    T = essential(triples)
    verts = {s for s, _, _ in T}
    frontier = {((), v) for v in verts}
    for _ in range(n):
        frontier = {(w + (a,), d) for w, v in frontier for s, d, a in T if s == v}
    return {w for w, _ in frontier}


def language(triples, L: int) -> set:
    out = set()
    for n in range(L + 1):
        out |= words_of_length(triples, n)
    return out


def _word_relation(T, w) -> set:
    """Pairs (u, v) joined by a path labeled w."""
    rel = {(v, v) for s, d, _ in T for v in (s, d)}
    for a in w:
        rel = {(u, d) for u, v in rel for s, d, b in T if s == v and b == a}
    return rel


def periodic_in(triples, w) -> bool:
    """w^inf lies in the shift iff the w-relation on the essential graph has a cycle."""
    T = essential(triples)
    rel = _word_relation(T, w)
    verts = {v for pair in rel for v in pair}
    reach = set(rel)
    for _ in range(len(verts) + 1):
        reach |= {(u, z) for u, v in reach for v2, z in rel if v == v2}
    return any((v, v) in reach for v in verts)


def least_period(w) -> int:
    n = len(w)
    return next(p for p in range(1, n + 1) if n % p == 0 and w == w[:p] * (n // p))


def alphabet_of(triples) -> list:
    return sorted({a for _, _, a in triples})


def q_count(triples, n: int, alphabet=None) -> int:
    """Points of least period n: primitive words w of length n with w^inf in the shift."""
    A = alphabet or alphabet_of(triples)
    return sum(1 for w in itertools.product(A, repeat=n)
               if least_period(w) == n and periodic_in(triples, w))


def closed_walk_count(triples, w) -> int:
    """Closed walks labeled w (any start vertex): periodic lifts of w^inf with the same period."""
    verts = {v for s, d, _ in triples for v in (s, d)}
    total = 0
    for v in verts:
        ends = {v: 1}
        for a in w:
            nxt = {}
            for u, c in ends.items():
                for s, d, b in triples:
                    if s == u and b == a:
                        nxt[d] = nxt.get(d, 0) + c
            ends = nxt
        total += ends.get(v, 0)
    return total


def r_count(triples, n: int) -> int:
    """Points of least period n having a preimage of least period n under the label map."""
    A = alphabet_of(triples)
    return sum(1 for w in itertools.product(A, repeat=n)
               if least_period(w) == n and closed_walk_count(triples, w) > 0)


def edge_shift_q(triples, n: int) -> int:
    """Periodic points of least period n of the edge shift, by enumerating closed walks."""
    out = {}
    for i, (s, _, _) in enumerate(triples):
        out.setdefault(s, []).append(i)
    count = 0

    def extend(walk):
        nonlocal count
        last = triples[walk[-1]]
        if len(walk) == n:
            if last[1] == triples[walk[0]][0] and least_period(tuple(walk)) == n:
                count += 1
            return
        for j in out.get(last[1], ()):
            extend(walk + [j])

    for i in range(len(triples)):
        extend([i])
    return count


def cycle_gcd(triples) -> int:
    """Gcd of closed-walk lengths up to 2|V|, found by boolean matrix powers."""
    verts = sorted({v for s, d, _ in triples for v in (s, d)})
    n = len(verts)
    pos = {v: i for i, v in enumerate(verts)}
    A = [[0] * n for _ in range(n)]
    for s, d, _ in triples:
        A[pos[s]][pos[d]] = 1
    P = [row[:] for row in A]
    lengths = []
    for k in range(1, 2 * n + 1):
        if any(P[i][i] for i in range(n)):
            lengths.append(k)
        P = [[int(any(P[i][m] and A[m][j] for m in range(n))) for j in range(n)] for i in range(n)]
    return reduce(math.gcd, lengths, 0)


def strongly_connected(triples) -> list:
    """Components via transitive closure; returns a list of frozensets."""
    verts = sorted({v for s, d, _ in triples for v in (s, d)})
    reach = {v: {v} for v in verts}
    changed = True
    while changed:
        changed = False
        for s, d, _ in triples:
            for v in verts:
                if s in reach[v] and d not in reach[v]:
                    reach[v].add(d)
                    changed = True
    comps = []
    for v in verts:
        c = frozenset(u for u in verts if u in reach[v] and v in reach[u])
        if c not in comps:
            comps.append(c)
    return comps


def synchronizing_refuted(triples, w, L: int) -> bool:
    """True when some aw, wb in the language have awb outside it (|a|, |b| <= L)."""
    lang = language(triples, L + len(w))
    full = language(triples, 2 * L + len(w))
    w = tuple(w)
    lefts = [a for a in lang if len(a) <= L and a + w in lang]
    rights = [b for b in lang if len(b) <= L and w + b in lang]
    return any(a + w + b not in full for a in lefts for b in rights)


def injective_label_map(triples) -> bool:
    """The 1-block label map is injective on the edge shift iff no bi-infinite path of
    the pair graph uses an off-diagonal edge pair."""
    pairs = [((s1, s2), (d1, d2), i != j)
             for i, (s1, d1, a) in enumerate(triples)
             for j, (s2, d2, b) in enumerate(triples) if a == b]
    ess = essential([(s, d, off) for s, d, off in pairs])
    return not any(off for _, _, off in ess)


def growth_rate(triples, n: int) -> float:
    """log(|B_{n+1}| / |B_n|): converges to the entropy."""
    a, b = len(words_of_length(triples, n)), len(words_of_length(triples, n + 1))
    return math.log(b / a)
