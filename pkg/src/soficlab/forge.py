"""Explicit cover constructions: receptive surgery, almost-invertible covers,
injective sub-SFTs and their growth by periodic orbits.

Every constructor validates its output before returning it; a failed check
raises ValidationError instead of handing back a doubtful object.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .census import (
    count_repetition_free_paths,
    cover_r,
    entropy,
    f_cycle_vertices,
    f_map,
    graph_entropy,
    is_receptive,
    periodic_in_graph,
    periodic_points,
    repetition_free_words,
    require_positive_entropy,
    sft_qn_oracle,
)
from .core import (
    CoverSpec,
    LabeledGraph,
    PrimitiveWord,
    ShiftHandle,
    as_word,
    graph_period,
    is_irreducible,
    least_period,
    lyndon_words,
    rotations,
    scc_decompose,
    subgraph,
    trim,
    word_str,
)
from .errors import (
    IterationBudgetExceeded,
    NotReceptiveError,
    PreconditionError,
    SearchBudgetExceeded,
    ValidationError,
    ZeroEntropyError,
)
from .presentation import determinize, fischer_cover, is_magic, shifts_equal
from .verify import SubSFT, degree, finite_to_one, injective_on

HAT = "^"


@dataclass
class ForgeResult:
    """A forged cover (or sub-SFT) with its construction data and validation report."""

    cover: object  # CoverSpec or SubSFT
    provenance: dict = field(default_factory=dict)
    validation: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def graph(self) -> LabeledGraph:
        return self.cover.graph

    def to_dict(self) -> dict:
        g = self.graph
        return {"provenance": self.provenance, "validation": self.validation,
                "graph": {"vertices": g.n, "edges": len(g.edges), "period": graph_period(g)
                          if is_irreducible(g) else None}}


def _word(w, alphabet) -> tuple:
    return w.word if isinstance(w, PrimitiveWord) else as_word(w, alphabet)


def _require(cond: bool, what: str, report: dict):
    report[what] = bool(cond)
    if not cond:
        raise ValidationError(f"validation failed: {what}")


def find_labeled_path(g: LabeledGraph, word, start=None, end=None) -> list | None:
    """Edge ids of some path labeled ``word`` (optionally fixing its end vertices)."""
    word = tuple(word)
    starts = range(g.n) if start is None else [g.index[start]]
    layer = {v: None for v in starts}
    back = []
    for a in word:
        nxt = {}
        for v in layer:
            for eid, j, lab in g.succ[v]:
                if lab == a and j not in nxt:
                    nxt[j] = (v, eid)
        back.append(nxt)
        layer = nxt
        if not layer:
            return None
    ends = [j for j in layer if end is None or g.vertices[j] == end]
    if not ends:
        return None
    j = ends[0]
    path = []
    for step in reversed(back):
        v, eid = step[j]
        path.append(eid)
        j = v
    return list(reversed(path))


class _Builder:
    """Accumulates triples and edge maps with fresh, collision-free vertex names."""

    def __init__(self, base: LabeledGraph | None = None, tag: str = "n"):
        self.triples = list(base.triples()) if base is not None else []
        self.emap = [e.id for e in base.edges] if base is not None else []
        self.vertices = list(base.vertices) if base is not None else []
        self.tag = tag
        self.k = 0

    def fresh(self) -> str:
        taken = set(self.vertices)
        while True:
            self.k += 1
            v = f"{HAT}{self.tag}{self.k}"
            if v not in taken:
                break
        self.vertices.append(v)
        return v

    def chain(self, src: str, dst: str | None, labels, dom_edges=None) -> str:
        """Path labeled ``labels`` from src; ends at ``dst`` (fresh vertex when None)."""
        labels = list(labels)
        cur = src
        for i, a in enumerate(labels):
            last = i == len(labels) - 1
            nxt = dst if (last and dst is not None) else self.fresh()
            self.triples.append((cur, nxt, a))
            self.emap.append(dom_edges[i] if dom_edges is not None else None)
            cur = nxt
        return cur

    def graph(self, alphabet) -> LabeledGraph:
        return LabeledGraph.build(self.triples, alphabet=alphabet, vertices=self.vertices)


# ---------------------------------------------------------------------------
# receptive surgery


def forge_receptive_cover(pi: CoverSpec, w) -> ForgeResult:
    """Add to ``pi``'s graph a cycle labeled ``w`` hooked in by receptivity words.

    Parameters
    ----------
    pi : CoverSpec
    w : word or PrimitiveWord
        Primitive word whose periodic point must be receptive in the image.

    Returns
    -------
    ForgeResult
        The enlarged cover: same image, and ``w^inf`` now has a preimage of
        least period ``|w|``.

    Raises
    ------
    NotReceptiveError
        When ``w^inf`` is not a receptive point of the image.
    """
    G = pi.graph
    Y = pi.codomain
    w = _word(w, G.alphabet)
    if least_period(w) != len(w):
        raise PreconditionError("w must be primitive")
    ok, wit = is_receptive(Y, w)
    if not ok:
        raise NotReceptiveError(f"{word_str(w)}^inf is not receptive")
    m1, m2 = tuple(wit.m1), tuple(wit.m2)
    alpha = find_labeled_path(G, m1 + w + m2)
    if alpha is None:
        raise ValidationError("no path carries the receptivity word")
    s = G.edges[alpha[0]].src
    t = G.edges[alpha[-1]].dst
    b = _Builder(G, "r")
    r = b.chain(s, None, m1 + w)
    b.chain(r, r, w)
    b.chain(r, t, m2)
    g2 = trim(b.graph(G.alphabet))
    cover = CoverSpec(g2, f"{pi.name or 'cover'}+{word_str(w)}")
    report = {}
    _require(shifts_equal(cover.codomain, Y), "image equals Y", report)
    _require(w in [tuple(x) for x in cover_r(g2, len(w))] or
             any(tuple(x) in set(rotations(w)) for x in cover_r(g2, len(w))),
             "w^inf has a preimage of least period |w|", report)
    p = graph_period(G)
    if len(w) % p == 0:
        _require(graph_period(g2) == p, "graph period preserved", report)
    report["graph_period"] = graph_period(g2)
    prov = {"construction": "receptive-cover", "w": word_str(w), "s": s, "t": t,
            "alpha": alpha, "m1": word_str(m1), "m2": word_str(m2), "r": r}
    return ForgeResult(cover, prov, report)


# ---------------------------------------------------------------------------
# almost-invertible covers


def _left_extend(g: LabeledGraph, u: tuple, length: int, bad: set) -> tuple | None:
    """Prefix u with letters (staying in the language) so that |u| = length and
    the n-prefix avoids ``bad``; BFS over prefixes in alphabet order."""
    from .verify import in_language
    q = deque([u])
    seen = {u}
    while q:
        x = q.popleft()
        if len(x) == length:
            if x[:len(next(iter(bad)))] not in bad:
                return x
            continue
        if len(x) > length:
            continue
        for a in g.alphabet:
            y = (a,) + x
            if y not in seen and in_language(g, y):
                seen.add(y)
                q.append(y)
    return None


def _right_extend(g: LabeledGraph, v: tuple, length: int, bad: set) -> tuple | None:
    rev = g.reversed()
    x = _left_extend(rev, tuple(reversed(v)), length, {tuple(reversed(b)) for b in bad})
    return None if x is None else tuple(reversed(x))


def _pattern_dfa(u, w, v, alphabet):
    """Subset automaton for Sigma* u w+ v; returns (trans, states, accept_of, u_done_of)."""
    # NFA states: 's'; ('u', i) i=1..|u|; ('w', j) j=1..n; ('v', i) i=1..|v|
    n = len(w)

    def step(q, a):
        out = set()
        if q == "s":
            out.add("s")
            if a == u[0]:
                out.add(("u", 1))
        elif q[0] == "u":
            i = q[1]
            if i < len(u) and a == u[i]:
                out.add(("u", i + 1))
            if i == len(u) and a == w[0]:
                out.add(("w", 1))
        elif q[0] == "w":
            j = q[1]
            if j < n and a == w[j]:
                out.add(("w", j + 1))
            if j == n:
                if a == w[0]:
                    out.add(("w", 1))
                if a == v[0]:
                    out.add(("v", 1))
        elif q[0] == "v":
            i = q[1]
            if i < len(v) and a == v[i]:
                out.add(("v", i + 1))
        return out

    start = frozenset(["s"])
    states = [start]
    index = {start: 0}
    trans = {}
    q = deque([start])
    while q:
        S = q.popleft()
        for a in alphabet:
            T = frozenset(x for p in S for x in step(p, a))
            if T not in index:
                index[T] = len(states)
                states.append(T)
                q.append(T)
            trans[(index[S], a)] = index[T]
    accept = [("v", len(v)) in S for S in states]
    udone = [("u", len(u)) in S for S in states]
    return trans, states, accept, udone


def _hat_graph(Y: ShiftHandle, w: tuple, u: tuple, v: tuple) -> tuple:
    """Presentation of the hatted shift and the symbol collapse map."""
    F = fischer_cover(Y)
    alphabet = tuple(F.graph.alphabet)
    n = len(w)
    hats = tuple(f"{HAT}{w[i]}{i}" for i in range(n))
    collapse = {a: a for a in alphabet}
    collapse.update({hats[i]: w[i] for i in range(n)})
    trans, states, accept, udone = _pattern_dfa(u, w, v, alphabet)
    reset = 0  # the automaton restarts after a hatted block
    triples = []
    seen = set()
    todo = deque()

    def name(st):
        return "|".join(map(str, st))

    def push(st):
        if st not in seen:
            seen.add(st)
            todo.append(st)

    for qv in range(F.n):
        for d in range(len(states)):
            if not accept[d]:
                push(("P", qv, d, 0))
    while todo:
        st = todo.popleft()
        if st[0] == "P":
            _, qv, d, vpos = st
            letters = [v[vpos]] if vpos else alphabet
            for a in letters:
                q2 = F.table.get((qv, a))
                d2 = trans[(d, a)]
                if q2 is None or accept[d2]:
                    continue
                nv = vpos + 1 if vpos and vpos + 1 < len(v) else 0
                nxt = ("P", q2, d2, nv)
                triples.append((name(st), name(nxt), a))
                push(nxt)
            if vpos == 0 and udone[d]:
                q2 = F.table.get((qv, w[0]))
                if q2 is not None:
                    nxt = ("H", q2, 1 % n)
                    triples.append((name(st), name(nxt), hats[0]))
                    push(nxt)
        else:
            _, qv, j = st
            q2 = F.table.get((qv, w[j]))
            if q2 is not None:
                nxt = ("H", q2, (j + 1) % n)
                triples.append((name(st), name(nxt), hats[j]))
                push(nxt)
            if j == 0:
                a = v[0]
                q2 = F.table.get((qv, a))
                d2 = trans[(reset, a)]
                if q2 is not None and not accept[d2]:
                    nxt = ("P", q2, d2, 1 % len(v) if len(v) > 1 else 0)
                    triples.append((name(st), name(nxt), a))
                    push(nxt)
    g = trim(LabeledGraph.build(triples, alphabet=alphabet + hats))
    # keep the irreducible piece carrying the hatted cycle; the other pieces only
    # hold points whose hatted versions already lie in its closure
    comp = max((c for c in scc_decompose(g) if c.cycle_bearing and
                any(v.startswith("H|") for v in c.vertices)), key=lambda c: len(c.vertices))
    return trim(subgraph(g, comp.vertices)), collapse, hats


def _collapse_graph(g: LabeledGraph, collapse: dict, alphabet) -> LabeledGraph:
    return g.relabel(lambda e: collapse[e.label], alphabet=alphabet)


def _lift_counts(Fh, collapse: dict, eta: tuple, L: int) -> int:
    """Number of words x of length L with collapse(x) = eta-block and x^inf in the hatted shift."""
    target = tuple(eta[i % len(eta)] for i in range(L))
    inv = {}
    for s, a in collapse.items():
        inv.setdefault(a, []).append(s)
    full = tuple(range(Fh.n))
    count = 0
    stack = [((), full)]
    while stack:
        x, S = stack.pop()
        if len(x) == L:
            if f_cycle_vertices(f_map(Fh, x)):
                count += 1
            continue
        for s in inv.get(target[len(x)], []):
            T = Fh.image(S, (s,))
            if T:
                stack.append((x + (s,), T))
    return count


def forge_ai_cover(Y: ShiftHandle, xi, n_check: int = 5) -> ForgeResult:
    """Almost-invertible cover of ``Y`` lifting ``xi`` to a synchronizing periodic point.

    Occurrences ``u w^k v`` are rewritten with fresh hatted symbols; the
    1-block collapse of the hatted shift onto ``Y`` is the returned cover.
    The cover's graph is a presentation of the hatted shift relabeled by the
    collapse, so its image is ``Y``.
    """
    require_positive_entropy(Y)
    F = fischer_cover(Y)
    w = _word(xi, F.graph.alphabet)
    n = len(w)
    if least_period(w) != n:
        raise PreconditionError("xi must be given by a primitive word")
    ok, wit = is_receptive(Y, w)
    if not ok:
        raise NotReceptiveError(f"{word_str(w)}^inf is not receptive")
    g = Y.presentation
    bad = set(rotations(w)) if n else set()
    bad_n = {tuple(r) for r in bad}
    last_error = None
    for length in range(max(len(wit.m1), len(wit.m2), n + 1), max(len(wit.m1), len(wit.m2), n + 1) + 6):
        u = _left_extend(g, tuple(wit.m1), length, bad_n)
        v = _right_extend(g, tuple(wit.m2), length, bad_n)
        if u is None or v is None:
            continue
        try:
            return _ai_from(Y, w, u, v, n_check)
        except ValidationError as exc:
            last_error = exc
    raise ValidationError(f"no admissible (u, v) produced a valid cover: {last_error}")


def _ai_from(Y, w, u, v, n_check) -> ForgeResult:
    F = fischer_cover(Y)
    alphabet = tuple(F.graph.alphabet)
    n = len(w)
    gh, collapse, hats = _hat_graph(Y, w, u, v)
    Yhat = ShiftHandle.of(gh, f"hat({Y.name})")
    cover = CoverSpec(_collapse_graph(gh, collapse, alphabet), f"ai({Y.name},{word_str(w)})")
    report = {}
    _require(shifts_equal(cover.codomain, Y), "image equals Y", report)
    Fh = fischer_cover(Yhat)
    what = tuple(hats)
    _require(any(is_magic(Fh, what * k) for k in range(1, 4)), "hatted lift is synchronizing", report)
    _require(least_period(what) == n, "lift has least period |xi|", report)
    sft = CoverSpec(_collapse_graph(Fh.graph, collapse, alphabet), cover.name + "-sft")
    _require(finite_to_one(sft), "finite-to-one", report)
    deg = degree(sft)
    report["degree"] = deg
    _require(deg == 1, "degree 1", report)
    orbit = {tuple(r) for r in rotations(w)}
    worst = {}
    for m in range(1, n_check + 1):
        for eta in periodic_points(Y, m):
            if tuple(eta) in orbit:
                continue
            c1 = _lift_counts(Fh, collapse, tuple(eta), m)
            c2 = _lift_counts(Fh, collapse, tuple(eta), 2 * m)
            if c1 != 1 or c2 != 1:
                worst[word_str(eta)] = [c1, c2]
    report["non_unique_preimages"] = worst
    _require(not worst, f"unique preimages up to n={n_check}", report)
    prov = {"construction": "ai-cover", "xi": word_str(w), "u": word_str(u), "v": word_str(v),
            "hats": list(hats), "hat_states": gh.n, "fischer_hat_states": Fh.n}
    return ForgeResult(cover, prov, report, {"hat_shift": Yhat, "collapse": collapse, "fischer_hat": Fh})


def ai_sft_cover(Y: ShiftHandle, xi) -> ForgeResult:
    """Compose the almost-invertible cover with the Fischer cover of the hatted shift.

    The result is an irreducible edge-shift cover of ``Y`` of degree 1 in
    which ``xi`` has a preimage of its own least period.
    """
    base = forge_ai_cover(Y, xi)
    Fh = base.extra["fischer_hat"]
    collapse = base.extra["collapse"]
    w = tuple(_word(xi, Y.alphabet))
    alphabet = tuple(fischer_cover(Y).graph.alphabet)
    cover = CoverSpec(_collapse_graph(Fh.graph, collapse, alphabet), f"ai-sft({Y.name},{word_str(w)})")
    report = dict(base.validation)
    _require(shifts_equal(cover.codomain, Y), "SFT cover image equals Y", report)
    deg = degree(cover)
    report["degree"] = deg
    _require(deg == 1, "SFT cover degree 1", report)
    lifts = {tuple(x) for x in cover_r(cover.graph, len(w))}
    _require(bool(lifts & {tuple(r) for r in rotations(w)}), "xi lifts with least period |xi|", report)
    hd, hy = graph_entropy(cover.graph), entropy(Y)
    _require(hd.lower <= hy.upper and hy.lower <= hd.upper, "entropy preserved", report)
    per_y = graph_period(fischer_cover(Y).graph)
    report["graph_period"] = graph_period(cover.graph)
    _require(report["graph_period"] % per_y == 0, "per(Y) divides the cover period", report)
    prov = dict(base.provenance, construction="ai-sft-cover")
    return ForgeResult(cover, prov, report, base.extra)


# ---------------------------------------------------------------------------
# injective sub-SFTs


def _simple_cycles(g: LabeledGraph, limit: int = 500) -> list:
    import networkx as nx
    out = []
    for k, cyc in enumerate(nx.simple_cycles(g.digraph())):
        out.append(cyc)
        if k >= limit:
            break
    return out


def _cycle_edges(g: LabeledGraph, cyc: list) -> list:
    out = []
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        out.append(min(eid for eid, j, _ in g.succ[g.index[a]] if g.vertices[j] == b))
    return out


def _shortest_edge_path(g: LabeledGraph, src: str, dst: str, allow_empty: bool = True) -> list:
    if allow_empty and src == dst:
        return []
    prev = {}
    q = deque([g.index[src]])
    seen = {g.index[src]} if allow_empty else set()
    while q:
        v = q.popleft()
        for eid, j, _ in g.succ[v]:
            if j in seen:
                continue
            seen.add(j)
            prev[j] = (v, eid)
            if g.vertices[j] == dst:
                path = []
                x = j
                while True:
                    pv, pe = prev[x]
                    path.append(pe)
                    x = pv
                    if x == g.index[src] and (allow_empty or len(path) > 0):
                        return list(reversed(path))
            q.append(j)
    raise ValidationError("vertex unreachable")


def _labels(g: LabeledGraph, path) -> tuple:
    return tuple(g.edges[e].label for e in path)


def _max_run(word: tuple, ubar: tuple) -> list:
    """Start positions of occurrences of ubar^2 in word (coarse run detector)."""
    L = len(ubar)
    return [i for i in range(len(word) - 2 * L + 1) if word[i:i + 2 * L] == ubar * 2]


def _marker(G: LabeledGraph, n: int):
    """Pick (ubar cycle, a, marker path) for repetition bound n."""
    cycles = sorted(_simple_cycles(G), key=lambda c: (len(c), c))
    if not cycles:
        raise ValidationError("graph has no cycle")
    prim = [c for c in cycles if least_period(_labels(G, _cycle_edges(G, c))) == len(c)]
    cyc = (prim or cycles)[0]
    u_edges = _cycle_edges(G, cyc)
    ubar = _labels(G, u_edges)
    rots = {tuple(r) for r in rotations(ubar)}
    ell = len(ubar)
    # a: a length-ell path whose label is not a rotation of ubar
    a = None
    for e0 in G.edges:
        frontier = [[e0.id]]
        for _ in range(ell - 1):
            frontier = [p + [eid] for p in frontier for eid, _, _ in G.succ[G.index[G.edges[p[-1]].dst]]]
        for p in frontier:
            if _labels(G, p) not in rots:
                a = p
                break
        if a:
            break
    if a is None:
        raise ValidationError("every path label is a rotation of the cycle label")
    c0 = cyc[0]
    s = G.edges[a[0]].src
    t = G.edges[a[-1]].dst
    b1 = _shortest_edge_path(G, t, c0)
    b2 = _shortest_edge_path(G, c0, s)
    return ubar, u_edges, a, b1, b2, s, t


def extract_injective_sub(pi: CoverSpec, eps, n_cap: int = 4, N_cap: int = 60,
                          edge_cap: int = 4000) -> ForgeResult:
    """Sub-SFT W of the cover's domain on which the labeling is injective and
    h(W) >= h(Y) - eps, with the same graph period.

    W consists of a fixed marker path followed by one chosen return path per
    label word (least edge-id path), looping back to the marker start.

    Raises
    ------
    PreconditionError
        When eps is not in (0, h(Y)).
    SearchBudgetExceeded
        When escalating the repetition bound and gap does not certify the
        entropy target within the caps.
    """
    G = pi.graph
    Y = pi.codomain
    eps = Fraction(eps)
    hy = require_positive_entropy(Y)
    if eps <= 0 or eps >= hy.lower:
        raise PreconditionError("need 0 < eps < h(Y)")
    p = graph_period(G)
    whole = SubSFT.whole(pi)
    if injective_on(pi, whole):
        report = {"injective": True, "fast_path": True}
        return ForgeResult(whole, {"construction": "injective-sub", "fast_path": True}, report)
    target = float(hy.upper - eps)
    theta = Fraction(math.exp(target) * (1 + 1e-9))
    for n in range(1, n_cap + 1):
        ubar, u_edges, a, b1, b2, s, t = _marker(G, n)
        for i in range(2 * n + 2, 2 * n + 6):
            vpath = a + b1 + u_edges * i + b2 + a
            mlen = len(vpath)
            # return paths t -> s avoiding ubar^(2n), escalating the gap N
            counts = {}
            chosen = []
            total = Fraction(0)
            g_all = 0
            for j in range(0, N_cap + 1):
                if j == 0:
                    c = 1 if t == s else 0
                else:
                    c = count_repetition_free_paths(G, t, s, j, n, ubar)
                if not c:
                    continue
                counts[j] = c
                total += c * theta ** -(mlen + j)
                g_all = math.gcd(g_all, mlen + j)
                if total > 1 and g_all == p:
                    break
            else:
                continue
            if sum(counts.values()) * (mlen + max(counts)) > edge_cap * 10:
                raise SearchBudgetExceeded("marker system too large")
            for j in sorted(counts):
                if j == 0:
                    chosen.append(((), ()))
                else:
                    chosen.extend(repetition_free_words(G, t, s, j, n, ubar))
            W = _materialize(G, vpath, chosen, s)
            if len(W.graph.edges) > edge_cap:
                raise SearchBudgetExceeded(f"sub-SFT has {len(W.graph.edges)} edges")
            if not injective_on(pi, W):
                continue
            hw = graph_entropy(W.graph)
            report = {"injective": True, "h_W_lower": float(hw.lower), "h_Y_upper": float(hy.upper),
                      "eps": float(eps), "certified_sum": float(total)}
            _require(hw.lower >= hy.upper - eps, "entropy floor", report)
            _require(graph_period(W.graph) == p, "graph period preserved", report)
            report["graph_period"] = p
            prov = {"construction": "injective-sub", "n": n, "i": i, "N": max(counts),
                    "ubar": word_str(ubar), "a": a, "s": s, "t": t, "marker": vpath,
                    "marker_label": word_str(_labels(G, vpath)),
                    "psi": {str(j): counts[j] for j in sorted(counts)}}
            return ForgeResult(W, prov, report)
    raise SearchBudgetExceeded("no injective marker system within the caps")


def _materialize(G: LabeledGraph, marker: list, returns: list, s: str) -> SubSFT:
    """Marker chain then a trie of return paths, all closing at the marker start."""
    b = _Builder(None, "w")
    center = b.fresh()
    end = b.chain(center, None if returns != [((), ())] else center,
                  _labels(G, marker), marker)
    trie = {(): end}
    for word, path in returns:
        path = list(path)
        if not path:
            # empty return: merge marker end with the center
            b.triples = [(x, center if y == end else y, lab) for x, y, lab in b.triples]
            continue
        for k in range(1, len(path) + 1):
            key = tuple(path[:k])
            if key in trie:
                continue
            last = k == len(path)
            dst = center if last else b.fresh()
            src = trie[key[:-1]]
            b.triples.append((src, dst, G.edges[path[k - 1]].label))
            b.emap.append(path[k - 1])
            if not last:
                trie[key] = dst
    used = {x for t in b.triples for x in t[:2]}
    b.vertices = [v for v in b.vertices if v in used]
    g = b.graph(G.alphabet)
    return SubSFT(g, tuple(b.emap), "marker system")


# ---------------------------------------------------------------------------
# enlarging by periodic orbits


def _domain_vertex(pi: CoverSpec, W: SubSFT) -> dict:
    """Domain vertex of each vertex of W's graph."""
    G = pi.graph
    out = {}
    for e in W.graph.edges:
        de = G.edges[W.edge_map[e.id]]
        out[e.src] = de.src
        out[e.dst] = de.dst
    return out


def _label_language_contains(g: LabeledGraph, word) -> bool:
    from .verify import in_language
    return in_language(g, tuple(word))


def _avoiding_path(G, src, dst, good, max_len: int = 12):
    """Shortest edge path src -> dst whose label satisfies ``good``."""
    layer = [[]]
    for L in range(max_len + 1):
        for pth in layer:
            end = src if not pth else G.edges[pth[-1]].dst
            if end == dst and good(_labels(G, pth)):
                return pth
        layer = [pth + [eid] for pth in layer
                 for eid, _, _ in G.succ[G.index[src if not pth else G.edges[pth[-1]].dst]]]
        if len(layer) > 200000:
            break
    return None


def enlarge_with_orbit(pi: CoverSpec, W: SubSFT, u_edges, K_cap: int = 6) -> ForgeResult:
    """Add the periodic orbit of the domain cycle ``u_edges`` to ``W`` keeping injectivity.

    The gadget leaves W at a vertex h along a path I, runs through at least
    K copies of the cycle, may loop on it, and returns to h along J.  The
    paths I and J are chosen so that their labels cannot be continued inside
    the orbit's label, and K is escalated until the fiber product check passes.
    """
    G = pi.graph
    u_edges = list(u_edges)
    lab = _labels(G, u_edges)
    if any(G.edges[a].dst != G.edges[b].src for a, b in zip(u_edges, u_edges[1:] + u_edges[:1])):
        raise PreconditionError("u must be a cycle of the domain")
    if least_period(lab) != len(lab):
        raise PreconditionError("the label of u has a smaller least period than u")
    if periodic_in_graph(W.graph, lab):
        raise PreconditionError("the label point of u already lies in the image of W")
    if not injective_on(pi, W):
        raise PreconditionError("the labeling is not injective on W")
    image_W = W.graph
    R = 1
    while _label_language_contains(image_W, lab * R):
        R += 1
        if R > 64:
            raise ValidationError("label power stays in the image of W")
    orbit_g = LabeledGraph.build([(str(i), str((i + 1) % len(lab)), lab[i]) for i in range(len(lab))],
                                 alphabet=G.alphabet)
    c = G.edges[u_edges[0]].src
    dv = _domain_vertex(pi, W)
    last = None
    for h in W.graph.vertices:
        hv = dv[h]
        I = _avoiding_path(G, hv, c, lambda x: not _label_language_contains(orbit_g, x + lab))
        J = _avoiding_path(G, c, hv, lambda x: not _label_language_contains(orbit_g, lab + x))
        if I is None or J is None:
            continue
        for K in range(R, R + K_cap):
            b = _Builder(W.graph, "t")
            b.emap = list(W.edge_map)
            x = b.chain(h, None, _labels(G, I), I) if I else h
            for _ in range(K):
                x = b.chain(x, None, lab, u_edges)
            loop = x
            b.chain(loop, loop, lab, u_edges)
            if J:
                b.chain(loop, h, _labels(G, J), J)
            else:
                b.triples = [(s_, h if d_ == loop else d_, l_) for s_, d_, l_ in b.triples]
            used = {y for t in b.triples for y in t[:2]}
            b.vertices = [v for v in b.vertices if v in used]
            T = SubSFT(b.graph(G.alphabet), tuple(b.emap), "enlarged")
            last = (h, K)
            if not is_irreducible(T.graph):
                continue
            if injective_on(pi, T) and periodic_in_graph(T.graph, lab):
                report = {"injective": True, "contains_orbit": True,
                          "contains_W": True, "irreducible": True}
                prov = {"construction": "enlarge", "u": u_edges, "label": word_str(lab), "R": R,
                        "I": I, "J": J, "K": K, "h": h}
                return ForgeResult(T, prov, report)
    raise ValidationError(f"no injective gadget found (last tried {last})")


def _cycle_for_label(G: LabeledGraph, w: tuple):
    for v in G.vertices:
        p = find_labeled_path(G, w, start=v, end=v)
        if p is not None:
            return p
    return None


def grow_periodic_support(pi: CoverSpec, eps, M: int, iter_cap: int = 64) -> ForgeResult:
    """Injective sub-SFT whose periodic points of period np (n <= M) match r_np(pi)."""
    base = extract_injective_sub(pi, eps)
    W = base.cover
    G = pi.graph
    p = graph_period(G)
    added = []
    for n in range(1, M + 1):
        for w in cover_r(G, n * p):
            w = tuple(w)
            if periodic_in_graph(W.graph, w):
                continue
            if len(added) >= iter_cap:
                raise IterationBudgetExceeded("too many orbits to add")
            cyc = _cycle_for_label(G, w)
            res = enlarge_with_orbit(pi, W, cyc)
            W = res.cover
            added.append(word_str(w))
    report = dict(base.validation)
    report["injective"] = injective_on(pi, W)
    _require(report["injective"], "injective after growth", report)
    edge = ShiftHandle.of(W.graph.relabel(lambda e: f"e{e.id}", [f"e{e.id}" for e in W.graph.edges]))
    match = {}
    for n in range(1, M + 1):
        m = n * p
        qw = sft_qn_oracle(edge, m)
        rm = m * len(cover_r(G, m))
        match[m] = [qw, rm]
    report["q_vs_r"] = match
    _require(all(a == b for a, b in match.values()), "q_np(W) = r_np(pi)", report)
    prov = dict(base.provenance, construction="grow", M=M, added=added)
    return ForgeResult(W, prov, report)


__all__ = ["ForgeResult", "find_labeled_path", "forge_receptive_cover", "forge_ai_cover",
           "ai_sft_cover", "extract_injective_sub", "enlarge_with_orbit", "grow_periodic_support",
           "ZeroEntropyError", "lyndon_words", "determinize"]
