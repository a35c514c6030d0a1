"""Independent checkers and brute-force oracles.

Nothing here reuses the transition tables of the presentation or census
modules: paths are walked straight off the edge list, so a bug in the
algorithms under test cannot hide in shared code.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product

from .core import CoverSpec, LabeledGraph, ShiftHandle, as_word, essential_vertices, is_irreducible
from .errors import BudgetExceeded, NotFiniteToOne, NotIrreducibleError


def _out_lists(g: LabeledGraph) -> dict:
    out = {v: [] for v in g.vertices}
    for e in g.edges:
        out[e.src].append(e)
    return out


def in_language(g: LabeledGraph, w) -> bool:
    """Does some path of the essential part of ``g`` carry the label ``w``?"""
    alive = essential_vertices(g)
    out = _out_lists(g)
    cur = set(alive)
    for a in w:
        cur = {e.dst for v in cur for e in out[v] if e.label == a and e.dst in alive}
        if not cur:
            return False
    return bool(cur)


def brute_language(Y, L: int, budget: int = 2_000_000) -> set:
    """All words of length <= L of the presented shift (the empty word included).

    Enumerates paths of the trimmed presentation depth-first.
    """
    g = Y.presentation if isinstance(Y, ShiftHandle) else Y
    words = {()}
    if g is None or L == 0:
        return words
    alive = essential_vertices(g)
    out = _out_lists(g)
    frontier = {(): set(alive)}
    for _ in range(L):
        nxt = {}
        for w, ends in frontier.items():
            for v in ends:
                for e in out[v]:
                    if e.dst in alive:
                        nxt.setdefault(w + (e.label,), set()).add(e.dst)
        frontier = nxt
        words.update(frontier)
        if len(words) > budget:
            raise BudgetExceeded("language enumeration exceeded its budget")
    return words


def refute_synchronizing(Y: ShiftHandle, w, L: int):
    """Search |a|, |b| <= L for aw, wb allowed but awb forbidden.

    Returns the first counterexample ``(a, b)`` in order of total length, or
    None (which is consistent with, not a proof of, synchronization).
    """
    g = Y.presentation
    w = as_word(w, g.alphabet)
    lang = brute_language(g, L)
    lefts = sorted((a for a in lang if in_language(g, a + w)), key=lambda x: (len(x), x))
    rights = sorted((b for b in lang if in_language(g, w + b)), key=lambda x: (len(x), x))
    pairs = sorted(product(lefts, rights), key=lambda ab: (len(ab[0]) + len(ab[1]), ab))
    for a, b in pairs:
        if not in_language(g, a + w + b):
            return a, b
    return None


# ---------------------------------------------------------------------------
# fiber products


@dataclass
class FiberProduct:
    """Pairs of vertices and pairs of equally labeled edges, trimmed to the essential part."""

    states: set
    edges: list  # ((u1, u2), (v1, v2), e1, e2)

    def off_diagonal_edges(self):
        return [t for t in self.edges if t[2] != t[3]]


def fiber_product(g: LabeledGraph, h: LabeledGraph | None = None, label=None) -> FiberProduct:
    """Fiber product of ``g`` with ``h`` (default: itself) over the labeling.

    ``label(edge)`` overrides the label used for matching, which lets a sub-SFT
    graph be matched by the cover labels of the edges it uses.
    """
    h = g if h is None else h
    lab = label or (lambda e: e.label)
    by_label = {}
    for f in h.edges:
        by_label.setdefault(lab(f), []).append(f)
    edges = [((e.src, f.src), (e.dst, f.dst), e.id, f.id)
             for e in g.edges for f in by_label.get(lab(e), [])]
    states = {s for t in edges for s in t[:2]}
    # trim
    while True:
        outd = {s: 0 for s in states}
        ind = {s: 0 for s in states}
        for s, t, _, _ in edges:
            if s in states and t in states:
                outd[s] += 1
                ind[t] += 1
        alive = {s for s in states if outd[s] and ind[s]}
        if alive == states:
            break
        states = alive
    edges = [t for t in edges if t[0] in states and t[1] in states]
    return FiberProduct(states, edges)


@dataclass
class SubSFT:
    """Edge shift of ``graph`` sitting inside a cover's domain.

    ``edge_map[k]`` is the domain edge id used by edge ``k`` of ``graph``;
    labels of ``graph`` are the cover labels of those domain edges.
    """

    graph: LabeledGraph
    edge_map: tuple
    note: str = ""

    @classmethod
    def whole(cls, pi: CoverSpec) -> "SubSFT":
        return cls(pi.graph, tuple(e.id for e in pi.graph.edges), "whole domain")

    def domain_path(self, path) -> list:
        return [self.edge_map[k] for k in path]


def injective_on(pi: CoverSpec, W: SubSFT) -> bool:
    """Is the labeling injective on the bi-infinite paths of ``W``?

    True iff the essential part of the fiber product of W with itself is the
    diagonal.
    """
    fp = fiber_product(W.graph)
    return all(e1 == e2 for _, _, e1, e2 in fp.edges)


def _diamond(g: LabeledGraph) -> bool:
    """Two distinct equally labeled paths with common start and end vertices."""
    by_label = {}
    for f in g.edges:
        by_label.setdefault(f.label, []).append(f)
    pairs = [((e.src, f.src), (e.dst, f.dst), e.id != f.id)
             for e in g.edges for f in by_label[e.label]]
    succ = {}
    pred = {}
    for s, t, _ in pairs:
        succ.setdefault(s, []).append(t)
        pred.setdefault(t, []).append(s)
    diag = [(v, v) for v in g.vertices]

    def closure(start, nbrs):
        seen = set(start)
        q = deque(start)
        while q:
            x = q.popleft()
            for y in nbrs.get(x, []):
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        return seen

    fwd = closure(diag, succ)
    bwd = closure(diag, pred)
    return any(off and s in fwd and t in bwd for s, t, off in pairs)


def finite_to_one(pi) -> bool:
    """Finite-to-one test for a 1-block cover: no graph diamond."""
    g = pi.graph if isinstance(pi, CoverSpec) else pi
    return not _diamond(g)


def _subsets_from_full(g: LabeledGraph) -> list:
    out = _out_lists(g)
    full = frozenset(g.vertices)
    seen = {full}
    q = deque([full])
    while q:
        S = q.popleft()
        for a in g.alphabet:
            T = frozenset(e.dst for v in S for e in out[v] if e.label == a)
            if T and T not in seen:
                seen.add(T)
                q.append(T)
    return list(seen)


def degree(pi) -> int:
    """Degree of a finite-to-one 1-block cover on an irreducible graph.

    Computed as the minimum, over words ``a c b`` of the language, of the
    number of edges labeled ``c`` that sit at the middle of some path
    labeled ``acb``: the forward subset after ``a`` fixes allowed sources,
    the backward subset before ``b`` fixes allowed targets.  Both subset
    automata are explored to closure, so the minimum is exact.
    """
    g = pi.graph if isinstance(pi, CoverSpec) else pi
    if not is_irreducible(g):
        raise NotIrreducibleError("degree needs an irreducible cover")
    if not finite_to_one(g):
        raise NotFiniteToOne("the cover has a graph diamond")
    fwd = _subsets_from_full(g)
    bwd = _subsets_from_full(g.reversed())
    best = None
    for F in fwd:
        for B in bwd:
            counts = {}
            for e in g.edges:
                if e.src in F and e.dst in B:
                    counts[e.label] = counts.get(e.label, 0) + 1
            for c in counts.values():
                if best is None or c < best:
                    best = c
                    if best == 1:
                        return 1
    return best


def preimage_count(g: LabeledGraph, word) -> int:
    """Number of periodic paths of period len(word) labeled by the periodic point word^inf.

    Counts closed walks of length n labeled ``word`` up to nothing: each such
    walk is a distinct preimage point of least period dividing n.
    """
    out = _out_lists(g)
    total = 0
    for v in g.vertices:
        paths = {v: 1}
        for a in word:
            nxt = {}
            for u, c in paths.items():
                for e in out[u]:
                    if e.label == a:
                        nxt[e.dst] = nxt.get(e.dst, 0) + c
            paths = nxt
        total += paths.get(v, 0)
    return total


# ---------------------------------------------------------------------------
# certificate and witness replay
#
# The replay recomputes every number a verdict relies on with the brute
# oracles above (word enumeration, closed walks, explicit matrix checks), or
# on a recoded presentation where a fast algorithm is unavoidable.


def _least_period(w) -> int:
    n = len(w)
    return next(d for d in range(1, n + 1) if n % d == 0 and tuple(w) == tuple(w[:d]) * (n // d))


def brute_q(Z: ShiftHandle, m: int) -> int:
    """q_m by brute force: words w of length m, primitive, with w^(V+1) allowed."""
    if Z.is_empty:
        return 0
    g = Z.presentation
    words = [w for w in brute_language(g, m) if len(w) == m]
    return sum(1 for w in words if _least_period(w) == m and in_language(g, w * (g.n + 1)))


def closed_walk_words(g: LabeledGraph, m: int) -> set:
    """Labels of closed walks of length m (edge list walk, no tables shared)."""
    out = _out_lists(g)
    found = set()
    for v in g.vertices:
        stack = [(v, ())]
        while stack:
            x, w = stack.pop()
            if len(w) == m:
                if x == v:
                    found.add(w)
                continue
            for e in out[x]:
                stack.append((e.dst, w + (e.label,)))
    return found


def brute_r(g: LabeledGraph, m: int) -> int:
    """Points of least period m with a preimage of least period m (closed walks of length m)."""
    return sum(1 for w in closed_walk_words(g, m) if _least_period(w) == m)


def brute_edge_q(g: LabeledGraph, m: int) -> int:
    h = g.relabel(lambda e: f"e{e.id}", [f"e{e.id}" for e in g.edges])
    return brute_r(h, m)


def replay_rec(Y: ShiftHandle, m: int) -> int:
    """rec_m recomputed on the 1-step higher block presentation, witnesses replayed."""
    from .census import is_receptive, validate_receptivity_witness
    from .core import higher_block
    h = ShiftHandle.of(higher_block(Y.presentation, 1)[0], f"{Y.name}[hb]")
    total = 0
    for w in _periodic_words(h, m):
        ok, wit = is_receptive(h, w)
        if ok:
            if not validate_receptivity_witness(h, w, wit, k_max=4):
                raise ValueError("receptivity witness failed replay")
            total += 1
    return total


def _periodic_words(Z: ShiftHandle, m: int) -> list:
    g = Z.presentation
    return [w for w in brute_language(g, m)
            if len(w) == m and _least_period(w) == m and in_language(g, w * (g.n + 1))]


def _rhs_value(kind: str, target, m: int) -> int:
    if kind == "q(W)":
        return brute_edge_q(_comparison_graph(kind, target), m)
    if kind == "r(pi)":
        return brute_r(target.graph, m)
    if kind == "rec(Y)":
        return replay_rec(target, m)
    raise ValueError(f"unknown comparison {kind}")


def _spectral_radius(A) -> float:
    import numpy as np
    M = np.array(A, dtype=float)
    if M.size == 0:
        return 0.0
    return float(max(abs(np.linalg.eigvals(M))))


def _subset_entropy(Y: ShiftHandle) -> float:
    """log spectral radius of the full subset automaton (a right-resolving presentation)."""
    import math
    import numpy as np
    g = Y.presentation
    out = _out_lists(g)
    full = frozenset(g.vertices)
    index = {full: 0}
    edges = []
    q = deque([full])
    while q:
        S = q.popleft()
        for a in g.alphabet:
            T = frozenset(e.dst for v in S for e in out[v] if e.label == a)
            if not T:
                continue
            if T not in index:
                index[T] = len(index)
                q.append(T)
            edges.append((index[S], index[T]))
    A = np.zeros((len(index), len(index)))
    for s, t in edges:
        A[s, t] += 1
    rho = _spectral_radius(A)
    return math.log(rho) if rho > 0 else float("-inf")


def _comparison_graph(kind: str, target):
    from .presentation import fischer_cover
    if kind == "q(W)":
        W = target
        return W.presentation if len({e.label for e in W.presentation.edges}) == len(W.presentation.edges) \
            else fischer_cover(W).graph
    if kind == "r(pi)":
        return target.graph
    return fischer_cover(target).graph


def _matrix(g: LabeledGraph, verts=None):
    verts = list(g.vertices) if verts is None else list(verts)
    pos = {v: i for i, v in enumerate(verts)}
    A = [[0] * len(verts) for _ in verts]
    for e in g.edges:
        if e.src in pos and e.dst in pos:
            A[pos[e.src]][pos[e.dst]] += 1
    return A, verts


def _matpow(A, m):
    n = len(A)
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(m):
        R = [[sum(R[i][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return R


def _frac(x):
    from fractions import Fraction
    if isinstance(x, dict):
        return Fraction(x["num"], x["den"])
    return Fraction(x)


def _sub_invariant(A, x, mu) -> bool:
    """Exact check A x <= mu x with x > 0."""
    return all(v > 0 for v in x) and all(
        sum(A[i][j] * x[j] for j in range(len(x))) <= mu * x[i] for i in range(len(x)))


def same_language(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    """Exact equality of the finite-word languages of two labeled graphs.

    Breadth-first search over pairs of follower subsets; the languages differ
    exactly when some word kills one subset but not the other.
    """
    from collections import deque

    def step(g, S, a):
        return frozenset(e.dst for v in S for e in g.edges if e.src == v and e.label == a)
    start = (frozenset(g1.vertices), frozenset(g2.vertices))
    seen, queue = {start}, deque([start])
    labels = sorted({e.label for e in g1.edges} | {e.label for e in g2.edges})
    while queue:
        S1, S2 = queue.popleft()
        for a in labels:
            T = (step(g1, S1, a), step(g2, S2, a))
            if bool(T[0]) != bool(T[1]):
                return False
            if T[0] and T not in seen:
                seen.add(T)
                queue.append(T)
    return True


def replay_tail(tail: dict, Z: ShiftHandle, kind: str, target) -> bool:
    """Re-check every inequality of a tail certificate exactly."""
    import networkx as nx
    rs = tail["r_side_bound"]
    qs = tail["q_side_bound"]
    p = rs["p"]
    g = Z.presentation
    if qs.get("presentation"):
        alph = sorted({t[2] for t in qs["presentation"]})
        g = LabeledGraph.build([tuple(t) for t in qs["presentation"]], alphabet=alph)
        if not same_language(g, Z.presentation):
            return False
    # q side: recompute the components and their matrices independently
    D = nx.MultiDiGraph()
    D.add_nodes_from(g.vertices)
    for e in g.edges:
        D.add_edge(e.src, e.dst)
    comps = [c for c in nx.strongly_connected_components(D)
             if len(c) > 1 or D.has_edge(next(iter(c)), next(iter(c)))]
    mats, cyc = {}, []
    for c in comps:
        A, verts = _matrix(g, [v for v in g.vertices if v in c])
        if sum(map(sum, A)) == len(c):
            cyc.append(len(c))
        else:
            mats[frozenset(verts)] = (A, verts)
    if len(mats) != len(qs["pieces"]) or max(cyc, default=0) != qs["finite_max"]:
        return False
    pieces = []
    for pc in qs["pieces"]:
        if frozenset(pc["vertices"]) not in mats:
            return False
        A, verts = _matrix(g, list(pc["vertices"]))
        x = [_frac(v) for v in pc["x"]]
        mu, C = _frac(pc["mu"]), _frac(pc["C"])
        if not _sub_invariant(A, x, mu) or C < sum(x) / min(x):
            return False
        pieces.append((C, mu))
    mats = [A for A, _ in mats.values()]
    G = _comparison_graph(kind, target) if rs.get("graph") else None
    crossover = tail["crossover"]
    if pieces:
        Ag, verts = _matrix(G)
        c = verts.index(rs["c"])
        l0, L, B = rs["l0"], rs["L"], rs["B"]
        K, gamma, r2, Cdiv = _frac(rs["K"]), _frac(rs["gamma"]), _frac(rs["r2"]), _frac(rs["C_div"])
        x = [_frac(v) for v in rs["x"]]

        def f(m):
            return _matpow(Ag, m)[c][c]
        if f(L) != B or not _sub_invariant(Ag, x, gamma) or gamma <= 1:
            return False
        if Cdiv < (max(x) / min(x)) * gamma / (gamma - 1):
            return False
        for r in range(L, 2 * L):
            if r % p == 0 and K ** L * B ** (r + l0) > f(r) ** L:
                return False
        if r2 >= 1 or r2 ** (2 * L) * B ** 2 < gamma ** L:
            return False
        rks = [(_frac(d["C"]), _frac(d["r"])) for d in rs["r_pieces"]]
        for (C, mu), (C2, rk) in zip(pieces, rks):
            if C2 != C or rk >= 1 or rk ** L * B < mu ** L:
                return False
        if crossover - l0 < 2 * L or crossover <= qs["finite_max"] or crossover % p:
            return False
        if not Cdiv * r2 ** crossover + sum(C * rk ** crossover for C, rk in rks) < K:
            return False
    # intermediate m: integer bounds recomputed, or exact values by brute force
    first = rs["start"] + (-rs["start"]) % p
    inter = {int(k): v for k, v in tail["intermediate"].items()}
    for m in range(first, crossover, p):
        d = inter.get(m)
        if d is None:
            return False
        if d.get("exact"):
            if brute_q(Z, m) > _rhs_value(kind, target, m):
                return False
            continue
        zq = sum(sum(map(sum, _matpow(A, m))) for A in mats) + sum(Lc for Lc in cyc if Lc % m == 0)
        if G is None:
            return False
        Ag, verts = _matrix(G)
        c = verts.index(rs["c"]) if "c" in rs else 0
        l0 = rs.get("l0", 0)
        P = _matpow(Ag, m - l0)
        bad = sum(sum(_matpow(Ag, dd)[c]) for dd in range(1, m // 2 + 1) if m % dd == 0)
        if zq > P[c][c] - bad:
            return False
    return True


def replay_periodic(cert: dict, Z: ShiftHandle) -> bool:
    from .presentation import fischer_cover
    kind = cert["kind"]
    p = cert["p"]
    if kind == "TRIVIAL":
        return p == 1 or Z.is_empty
    col = cert["coloring"]
    if kind == "SFT_EXACT":
        g = Z.presentation if len({e.label for e in Z.presentation.edges}) == len(Z.presentation.edges) \
            else fischer_cover(Z).graph
        alive = essential_vertices(g)
        return all((col[e.src] + 1 - col[e.dst]) % p == 0 for e in g.edges
                   if e.src in alive and e.dst in alive)
    if kind == "WINDOW_COLORING":
        L = 2 * cert["k"] + 1
        from .period import block_label
        blocks = [w for w in brute_language(Z, L + 1) if len(w) == L + 1]
        for b in blocks:
            x, y = block_label(b[:-1]), block_label(b[1:])
            if x not in col or y not in col or (col[x] + 1 - col[y]) % p:
                return False
        return True
    return False


def replay_witness(w: dict, Z: ShiftHandle, kind: str, target) -> bool:
    """Re-validate a NO witness."""
    from .core import as_word
    k = w["kind"]
    if k == "COUNT":
        m = w["n"]
        q = brute_q(Z, m)
        r = _rhs_value(w["rhs_name"], target, m)
        return q == w["q"] and r == w["rhs"] and q > r
    if k in ("PERIOD_OBSTRUCTION", "SFT_EXACT"):
        if "point" not in w:
            return False
        word = as_word(w["point"], Z.alphabet)
        return (in_language(Z.presentation, word * (Z.presentation.n + 1))
                and _least_period(word) % w["p"] != 0)
    if k == "ENTROPY":
        T = target if isinstance(target, ShiftHandle) else target.codomain
        hz, ht = _subset_entropy(Z), _subset_entropy(T)
        return hz > ht + 1e-12 and abs(hz - float(_frac(w["h_Z_lower"]))) < 1e-6
    if k == "ALL_COMPONENTS":
        from .structure import component_tree
        tree = component_tree(target)
        comps = {(c.level, c.index): c for c in tree.components}
        for item in w["components"]:
            c = comps.get((item["level"], item["index"]))
            if c is None or item["verdict"] != "NO":
                return False
            if not replay_witness(item["witness"], Z, "s-fact", c.closure):
                return False
        return len(w["components"]) >= 1
    return False


def replay_conjugacy(cert: dict, Z: ShiftHandle, Y: ShiftHandle) -> bool:
    from .core import higher_block
    from .presentation import fischer_cover
    gz = higher_block(fischer_cover(Z).graph, cert["m_Z"])[0]
    gy = higher_block(fischer_cover(Y).graph, cert["m_target"])[0]
    f = cert["vertex_map"]
    if sorted(f) != sorted(gz.vertices) or sorted(f.values()) != sorted(gy.vertices):
        return False
    cz, cy = {}, {}
    for e in gz.edges:
        cz[(f[e.src], f[e.dst])] = cz.get((f[e.src], f[e.dst]), 0) + 1
    for e in gy.edges:
        cy[(e.src, e.dst)] = cy.get((e.src, e.dst), 0) + 1
    sft = all(a == b for *_, a, b in fiber_product(fischer_cover(Z).graph).edges) and \
        all(a == b for *_, a, b in fiber_product(fischer_cover(Y).graph).edges)
    return cz == cy and sft


def replay_certificate(cert: dict, Z: ShiftHandle, kind: str, target) -> bool:
    """Re-validate a YES certificate."""
    if cert is None:
        return False
    ck = cert.get("kind")
    T = target if isinstance(target, ShiftHandle) else target.codomain
    if ck == "EMPTY":
        return Z.is_empty
    if ck == "CONJUGATE":
        return replay_conjugacy(cert, Z, T)
    if ck == "CONJUGATE_WITH_SECTION":
        return replay_conjugacy(cert["conjugacy"], Z, T) and injective_on(target, SubSFT.whole(target))
    if ck == "COMPONENT":
        from .structure import component_tree
        tree = component_tree(target)
        c = next((c for c in tree.components if (c.level, c.index) == (cert["level"], cert["index"])), None)
        return c is not None and replay_certificate(cert["sub"], Z, "s-fact", c.closure)
    if "s_factorizable" in cert:
        ai = cert["ai_cover"]["validation"]
        return replay_certificate(cert["s_factorizable"], Z, kind, target) and all(
            v for k, v in ai.items() if isinstance(v, bool))
    counts, per, ent = cert.get("counts"), cert.get("periodic"), cert.get("entropy")
    if counts is None or per is None or ent is None:
        return False
    rhs_name = {"sft-embed": "q(W)", "through-cover": "r(pi)"}.get(kind, "rec(Y)")
    for m, (q, r) in counts["checked"].items():
        if int(m) <= 8 and (brute_q(Z, int(m)) != q or _rhs_value(rhs_name, target, int(m)) != r or q > r):
            return False
    tail = counts["tail"]
    if tail != "empty Z" and not replay_tail(tail, Z, rhs_name, target):
        return False
    if not replay_periodic(per, Z):
        return False
    if ent.get("h_Z") != "empty":
        if not _subset_entropy(Z) < _subset_entropy(T) - 1e-12:
            return False
    return True


def audit_verdict(verdict, Z: ShiftHandle, kind: str, target) -> dict:
    """Replay a verdict's witness or certificate; UNKNOWN needs nothing.

    ``verdict`` may be a Verdict3 or its ``to_dict()`` form.
    """
    from .verdict import jsonable
    d = verdict.to_dict() if hasattr(verdict, "to_dict") else verdict
    d = jsonable(d)
    if d["verdict"] == "UNKNOWN":
        return {"verdict": "UNKNOWN", "replayed": False, "ok": True}
    if d["verdict"] == "NO":
        ok = replay_witness(d["witness"], Z, kind, target)
    else:
        ok = replay_certificate(d["certificate"], Z, kind, target)
    return {"verdict": d["verdict"], "replayed": True, "ok": bool(ok)}
