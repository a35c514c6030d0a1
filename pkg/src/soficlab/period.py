"""Periods of sofic shifts, p-periodicity, and cyclic classes of covers."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd

import networkx as nx

from .census import census, gcd_of_support, periodic_in_graph, periodic_points
from .core import (
    SFT_EDGE_SHIFT,
    CoverSpec,
    LabeledGraph,
    ShiftHandle,
    bfs_depths,
    essential_vertices,
    graph_period,
    is_irreducible,
    subgraph,
    word_str,
)
from .errors import NotIrreducibleError
from .presentation import determinize, fischer_cover, left_fischer_cover
from .verdict import Verdict3


@dataclass
class PeriodReport:
    per: int
    p3_left: int
    p4_empirical: int
    p5_empirical: int
    q_gcd: int
    n_max: int
    consistent: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def period_of(Y: ShiftHandle, n_max: int = 8) -> PeriodReport:
    """per(Y) from the right Fischer cover, cross-checked against the left cover and census.

    ``p4_empirical`` and ``p5_empirical`` are gcds of the least periods of
    receptive and synchronizing points found up to ``n_max`` (0 if none).
    """
    if not Y.is_irreducible():
        raise NotIrreducibleError("period_of needs an irreducible shift")
    per = graph_period(fischer_cover(Y).graph)
    left = graph_period(left_fischer_cover(Y).graph)
    t = census(Y, n_max)
    p4 = gcd_of_support(t.rec)
    p5 = gcd_of_support(t.s)
    pq = gcd_of_support(t.q)
    ok = per == left and p4 % per == 0 and p5 % per == 0
    return PeriodReport(per, left, p4, p5, pq, n_max, ok)


# ---------------------------------------------------------------------------
# cyclic partitions


@dataclass
class CyclicPartition:
    p: int
    classes: dict  # vertex -> residue

    def members(self, i: int) -> list:
        return [v for v, r in self.classes.items() if r == i]

    def to_dict(self) -> dict:
        return {"p": self.p, "classes": dict(self.classes)}


def canonical_cyclic_partition(X) -> CyclicPartition:
    """Residues of BFS depths modulo the graph period; every edge adds one."""
    g = X.presentation if isinstance(X, ShiftHandle) else X
    if g is None or not is_irreducible(g):
        raise NotIrreducibleError("canonical_cyclic_partition needs an irreducible graph")
    p = graph_period(g)
    depth = bfs_depths(g)
    return CyclicPartition(p, {v: depth[i] % p for i, v in enumerate(g.vertices)})


def block_label(word) -> str:
    return word_str(word) if all(len(a) == 1 for a in word) else ".".join(word)


def power_graph(g: LabeledGraph, p: int, start_vertices) -> LabeledGraph:
    """Paths of length ``p`` from ``start_vertices`` as single edges labeled by p-blocks."""
    starts = set(start_vertices)
    triples = []
    for v in g.vertices:
        if v not in starts:
            continue
        frontier = [(g.index[v], ())]
        for _ in range(p):
            frontier = [(j, lab + (a,)) for i, lab in frontier for _, j, a in g.succ[i]]
        for j, lab in frontier:
            triples.append((v, g.vertices[j], block_label(lab)))
    alphabet = sorted({t[2] for t in triples})
    return LabeledGraph.build(triples, alphabet=alphabet, vertices=[v for v in g.vertices if v in starts])


def cyclic_images(pi: CoverSpec) -> list:
    """Presentations of the images of the cyclic classes of the cover's domain.

    Class ``i`` is presented as a shift over p-blocks: the p-th power graph
    restricted to vertices of residue ``i``.  Listed in cyclic order.
    """
    part = canonical_cyclic_partition(pi.graph)
    out = []
    for i in range(part.p):
        h = power_graph(pi.graph, part.p, part.members(i))
        out.append(ShiftHandle.of(h, f"{pi.name or 'cover'}[class {i} of {part.p}]"))
    return out


# ---------------------------------------------------------------------------
# p-periodicity


@dataclass
class PPeriodicityCertificate:
    kind: str  # WINDOW_COLORING | PERIOD_OBSTRUCTION | SFT_EXACT
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.data}


def signed_potentials(vertices, edges):
    """Potentials along an undirected spanning forest and the imbalance gcd per component.

    ``edges`` are (src, dst) pairs; each edge asks pot[dst] = pot[src] + 1.
    Returns (pot, comp, gcd_by_comp).
    """
    adj = {v: [] for v in vertices}
    for s, t in edges:
        adj[s].append((t, 1))
        adj[t].append((s, -1))
    pot, comp = {}, {}
    for root in vertices:
        if root in pot:
            continue
        pot[root] = 0
        comp[root] = root
        q = deque([root])
        while q:
            x = q.popleft()
            for y, d in adj[x]:
                if y not in pot:
                    pot[y] = pot[x] + d
                    comp[y] = root
                    q.append(y)
    g = {}
    for s, t in edges:
        c = comp[s]
        g[c] = gcd(g.get(c, 0), abs(pot[s] + 1 - pot[t]))
    return pot, comp, g


def _cycle_not_divisible(g: LabeledGraph, p: int, limit: int = 2000):
    D = nx.MultiDiGraph()
    D.add_nodes_from(g.vertices)
    for e in g.edges:
        D.add_edge(e.src, e.dst)
    for k, cyc in enumerate(nx.simple_cycles(D)):
        if len(cyc) % p:
            return cyc
        if k > limit:
            break
    return None


def _graph_coloring_verdict(g: LabeledGraph, p: int, kind: str, extra: dict) -> Verdict3 | None:
    live = essential_vertices(g)
    h = subgraph(g, live)
    pot, comp, gs = signed_potentials(list(h.vertices), [(e.src, e.dst) for e in h.edges])
    if all(x % p == 0 for x in gs.values()):
        coloring = {v: pot[v] % p for v in h.vertices}
        return Verdict3.yes(PPeriodicityCertificate(kind, {**extra, "p": p, "coloring": coloring}))
    return None


def is_sft_presentation(Y: ShiftHandle) -> bool:
    """True when the labels of the (irreducible) Fischer cover define a conjugacy."""
    from .verify import fiber_product
    if not Y.is_irreducible():
        return Y.kind == SFT_EDGE_SHIFT
    F = fischer_cover(Y)
    return all(a == b for _, _, a, b in fiber_product(F.graph).edges)


def block_words(Z: ShiftHandle, L: int) -> list:
    """All words of length L of the shift, via the subset automaton of its trimmed presentation."""
    g = Z.presentation
    D = determinize(g)
    layer = [((), 0)]
    for _ in range(L):
        layer = [(w + (a,), D.trans[(s, a)]) for w, s in layer for a in g.alphabet if (s, a) in D.trans]
    return [w for w, _ in layer]


def window_coloring(Z: ShiftHandle, p: int, k: int):
    """Search an increment coloring of (2k+1)-blocks; returns (coloring, gcds)."""
    L = 2 * k + 1
    big = block_words(Z, L + 1)
    small = sorted({w[:-1] for w in big} | {w[1:] for w in big})
    pot, comp, gs = signed_potentials(small, [(w[:-1], w[1:]) for w in big])
    if all(x % p == 0 for x in gs.values()):
        return {block_label(b): pot[b] % p for b in small}, gs
    return None, gs


def is_p_periodic(Z: ShiftHandle, p: int, k_max: int = 3, n_max: int = 8) -> Verdict3:
    """Decide whether ``Z`` admits a clopen partition into p sets cyclically permuted by the shift.

    Parameters
    ----------
    Z : ShiftHandle
    p : int
        Candidate period, at least 1.
    k_max : int
        Largest window radius tried by the coloring search.
    n_max : int
        Periodic points of least period up to ``n_max`` are scanned for an obstruction.

    Returns
    -------
    Verdict3
        YES with an SFT_EXACT or WINDOW_COLORING certificate, NO with a
        PERIOD_OBSTRUCTION witness, or UNKNOWN when neither is found.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if Z.is_empty or p == 1:
        return Verdict3.yes(PPeriodicityCertificate("TRIVIAL", {"p": p}))
    g = Z.presentation
    exact_graph = None
    if Z.kind == SFT_EDGE_SHIFT:
        exact_graph = g
    elif Z.is_irreducible() and is_sft_presentation(Z):
        exact_graph = fischer_cover(Z).graph
    if exact_graph is not None:
        v = _graph_coloring_verdict(exact_graph, p, "SFT_EXACT", {})
        if v is not None:
            return v
        cyc = _cycle_not_divisible(exact_graph, p)
        wit = {"kind": "SFT_EXACT", "p": p}
        if cyc is not None:
            # a closed walk of length not divisible by p carries a periodic point
            word = _cycle_label(exact_graph, cyc)
            wit.update(point=word_str(word), length=len(word))
        else:
            pot, comp, gs = signed_potentials(list(exact_graph.vertices),
                                              [(e.src, e.dst) for e in exact_graph.edges])
            wit.update(imbalance_gcds=sorted(gs.values()))
        return Verdict3.no(wit)
    for m in range(1, n_max + 1):
        if m % p == 0:
            continue
        pts = periodic_points(Z, m)
        if pts:
            return Verdict3.no({"kind": "PERIOD_OBSTRUCTION", "point": word_str(pts[0]),
                                "least_period": m, "p": p}, checked_up_to=m)
    for k in range(k_max + 1):
        col, _ = window_coloring(Z, p, k)
        if col is not None:
            return Verdict3.yes(PPeriodicityCertificate("WINDOW_COLORING", {"k": k, "p": p, "coloring": col}),
                                checked_up_to=n_max)
    return Verdict3.unknown(n_max, [f"no window coloring up to k={k_max} and no period obstruction "
                                    f"up to n={n_max}"])


def _cycle_label(g: LabeledGraph, cyc: list) -> tuple:
    word = []
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        word.append(next(lab for _, j, lab in g.succ[g.index[a]] if g.vertices[j] == b))
    return tuple(word)


def periodic_obstruction_holds(Z: ShiftHandle, word) -> bool:
    """Replay helper: the witness point really lies in Z."""
    return periodic_in_graph(Z.presentation, tuple(word))
