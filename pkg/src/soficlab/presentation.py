"""Determinization, Fischer covers, magic words and equality of irreducible sofic shifts."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .core import (
    Edge,
    LabeledGraph,
    ShiftHandle,
    as_word,
    is_irreducible,
    scc_decompose,
    trim,
)
from .errors import NotIrreducibleError, ValidationError


@dataclass
class SubsetAutomaton:
    """Subset construction of ``base`` seeded at the full vertex set (state 0)."""

    base: LabeledGraph
    states: list  # frozensets of base vertex indices
    trans: dict  # (state, symbol) -> state

    @cached_property
    def state_index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def run(self, w, start: int = 0):
        """State index after reading ``w`` from ``start``, or None when w dies."""
        s = start
        for a in w:
            s = self.trans.get((s, a))
            if s is None:
                return None
        return s

    def image(self, w, start: int = 0) -> frozenset:
        s = self.run(w, start)
        return frozenset() if s is None else self.states[s]

    def successors(self, s: int):
        for a in self.base.alphabet:
            t = self.trans.get((s, a))
            if t is not None:
                yield a, t


def subset_step(g: LabeledGraph, S, a) -> frozenset:
    return frozenset(j for i in S for j in g.step[i].get(a, ()))


def determinize(g: LabeledGraph, start=None) -> SubsetAutomaton:
    """Subset construction from the full vertex set (or ``start``).

    Every reachable non-empty subset becomes a state; transitions to the
    empty set are left undefined.
    """
    first = frozenset(range(g.n)) if start is None else frozenset(start)
    states = [first]
    index = {first: 0}
    trans = {}
    q = deque([0])
    while q:
        s = q.popleft()
        S = states[s]
        for a in g.alphabet:
            T = subset_step(g, S, a)
            if not T:
                continue
            t = index.get(T)
            if t is None:
                t = index[T] = len(states)
                states.append(T)
                q.append(t)
            trans[(s, a)] = t
    return SubsetAutomaton(g, states, trans)


def refine(n_states: int, alphabet, trans: dict) -> list:
    """Coarsest partition where equivalent states agree on defined symbols and successors' blocks.

    Returns the block id of every state; blocks are numbered by first occurrence.
    """
    block = [0] * n_states
    while True:
        sigs = {}
        new = []
        for s in range(n_states):
            sig = (block[s],) + tuple(
                block[trans[(s, a)]] if (s, a) in trans else -1 for a in alphabet)
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == len(set(block)):
            return new
        block = new


@dataclass
class FischerCover:
    """A minimal right-resolving (or, with ``side='left'``, left-resolving) presentation."""

    graph: LabeledGraph
    table: dict  # (vertex index, symbol) -> vertex index, along the resolving direction
    side: str = "right"
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.graph.n

    def run(self, v: int, w):
        for a in w:
            v = self.table.get((v, a))
            if v is None:
                return None
        return v

    def image(self, S, w) -> frozenset:
        S = frozenset(S)
        for a in w:
            S = frozenset(self.table[(v, a)] for v in S if (v, a) in self.table)
            if not S:
                break
        return S

    @property
    def subset_automaton(self) -> SubsetAutomaton:
        if "sa" not in self._memo:
            g = self.graph if self.side == "right" else self.graph.reversed()
            self._memo["sa"] = determinize(g)
        return self._memo["sa"]


def _name_subset(g: LabeledGraph, S) -> str:
    return "{" + ",".join(g.vertices[i] for i in sorted(S)) + "}"


def _as_graph(Y) -> LabeledGraph:
    if isinstance(Y, ShiftHandle):
        if Y.is_empty:
            raise NotIrreducibleError("the empty shift has no Fischer cover")
        return Y.presentation
    if isinstance(Y, LabeledGraph):
        return trim(Y)
    raise TypeError(f"expected ShiftHandle or LabeledGraph, got {type(Y).__name__}")


def _right_fischer(g: LabeledGraph) -> FischerCover:
    D = determinize(g)
    alphabet = g.alphabet
    block = refine(len(D.states), alphabet, D.trans)
    nb = max(block) + 1
    qtrans = {}
    for (s, a), t in D.trans.items():
        qtrans[(block[s], a)] = block[t]
    # the follower-set graph of an irreducible sofic shift has a unique sink
    # component, formed by the follower sets of synchronizing words
    qg = LabeledGraph.build([(str(b), str(c), a) for (b, a), c in sorted(qtrans.items(), key=lambda kv: (kv[0][0], alphabet.index(kv[0][1])))],
                            alphabet=alphabet, vertices=[str(b) for b in range(nb)])
    comps = scc_decompose(qg)
    exits = {c: False for c in range(len(comps))}
    where = {}
    for k, c in enumerate(comps):
        for v in c.vertices:
            where[v] = k
    for e in qg.edges:
        if where[e.src] != where[e.dst]:
            exits[where[e.src]] = True
    sinks = [k for k, c in enumerate(comps) if c.cycle_bearing and not exits[k]]
    if len(sinks) != 1:
        raise NotIrreducibleError(f"presentation has {len(sinks)} terminal components; the shift is reducible")
    sink = comps[sinks[0]].vertices
    members = sorted(int(v) for v in sink)
    # every word of the shift must be readable in the sink, else the shift is reducible
    sink_set = frozenset(members)
    seen = {(0, sink_set)}
    q = deque(seen)
    while q:
        s, T = q.popleft()
        for a in alphabet:
            t = D.trans.get((s, a))
            if t is None:
                continue
            T2 = frozenset(qtrans[(b, a)] for b in T if (b, a) in qtrans)
            if not T2:
                raise NotIrreducibleError("the presented shift is reducible")
            if (t, T2) not in seen:
                seen.add((t, T2))
                q.append((t, T2))
    # representative subset per block: the smallest one, for readable names
    rep = {}
    for s, S in enumerate(D.states):
        b = block[s]
        if b in sink_set:
            key = (len(S), sorted(S))
            if b not in rep or key < rep[b][0]:
                rep[b] = (key, S)
    order = sorted(members, key=lambda b: rep[b][0])
    idx = {b: i for i, b in enumerate(order)}
    names = [_name_subset(g, rep[b][1]) for b in order]
    triples = []
    table = {}
    for b in order:
        for a in alphabet:
            c = qtrans.get((b, a))
            if c is not None:
                triples.append((names[idx[b]], names[idx[c]], a))
                table[(idx[b], a)] = idx[c]
    fg = LabeledGraph.build(triples, alphabet=alphabet, vertices=names)
    return FischerCover(fg, table, "right")


def fischer_cover(Y) -> FischerCover:
    """Right Fischer cover of an irreducible sofic shift.

    Parameters
    ----------
    Y : ShiftHandle or LabeledGraph
        Any presentation of the shift; it need not be right-resolving.

    Returns
    -------
    FischerCover
        Irreducible, right-resolving and follower-separated.  Vertex names
        are the smallest base-vertex subsets collapsing onto each state.

    Raises
    ------
    NotIrreducibleError
        When the presented shift is not irreducible.

    Examples
    --------
    >>> from soficlab.corpus import even_shift
    >>> fischer_cover(even_shift()).n
    2
    """
    if isinstance(Y, ShiftHandle):
        return Y.cached("fischer", lambda: _right_fischer(_as_graph(Y)))
    return _right_fischer(_as_graph(Y))


def _left_fischer(g: LabeledGraph) -> FischerCover:
    F = _right_fischer(g.reversed())
    return FischerCover(F.graph.reversed(), F.table, "left")


def left_fischer_cover(Y) -> FischerCover:
    """Left Fischer cover: the right cover of the reversed presentation, re-reversed.

    ``table`` maps (vertex, symbol) to the unique predecessor along that symbol.
    """
    if isinstance(Y, ShiftHandle):
        return Y.cached("left_fischer", lambda: _left_fischer(_as_graph(Y)))
    return _left_fischer(_as_graph(Y))


@dataclass(frozen=True)
class MagicCheck:
    result: bool
    flag: str | None = None
    image: frozenset = frozenset()

    def __bool__(self):
        return self.result


NOT_IN_LANGUAGE = "NOT_IN_LANGUAGE"


def is_magic(F, w) -> MagicCheck:
    """True iff reading ``w`` from the full vertex set lands on exactly one vertex."""
    if isinstance(F, FischerCover):
        g = F.graph
        w = as_word(w, g.alphabet)
        if F.side == "right":
            S = F.image(range(F.n), w)
        else:
            S = F.image(range(F.n), tuple(reversed(w)))
    elif isinstance(F, SubsetAutomaton):
        w = as_word(w, F.base.alphabet)
        S = F.image(w)
    else:
        raise TypeError("is_magic expects a FischerCover or SubsetAutomaton")
    if not S:
        return MagicCheck(False, NOT_IN_LANGUAGE, S)
    return MagicCheck(len(S) == 1, None, S)


def is_synchronizing(Y: ShiftHandle, w) -> MagicCheck:
    """Synchronizing words of an irreducible shift are exactly the magic words of its Fischer cover."""
    return is_magic(fischer_cover(Y), w)


def find_magic_word(F: FischerCover, target: int | None = None):
    """Shortest magic word (optionally collapsing onto ``target``), found by BFS."""
    # the returned word is never empty, even when the cover has one vertex
    full = frozenset(range(F.n))
    root = ("root",)
    prev = {root: None}
    q = deque([root])
    alphabet = F.graph.alphabet
    found = None
    while q:
        S = q.popleft()
        if S is not root and len(S) == 1 and (target is None or target in S):
            found = S
            break
        for a in alphabet:
            src = full if S is root else S
            T = frozenset(F.table[(v, a)] for v in src if (v, a) in F.table)
            if T and T not in prev:
                prev[T] = (S, a)
                q.append(T)
    if found is None:
        if target is None:
            raise ValidationError("no magic word: the cover is not a Fischer cover of an irreducible shift")
        m = find_magic_word(F)
        v = next(iter(F.image(range(F.n), m)))
        return m + path_word(F, v, target)
    word = []
    S = found
    while prev[S] is not None:
        S, a = prev[S]
        word.append(a)
    return tuple(reversed(word))


def path_word(F: FischerCover, src: int, dst: int):
    """Label of a shortest path from ``src`` to ``dst`` in a right-resolving cover."""
    prev = {src: None}
    q = deque([src])
    while q:
        v = q.popleft()
        if v == dst:
            break
        for a in F.graph.alphabet:
            u = F.table.get((v, a))
            if u is not None and u not in prev:
                prev[u] = (v, a)
                q.append(u)
    if dst not in prev:
        raise ValidationError("vertex unreachable")
    out = []
    v = dst
    while prev[v] is not None:
        v, a = prev[v]
        out.append(a)
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# canonical forms and equality


def canonical_form(g: LabeledGraph) -> tuple:
    """Isomorphism invariant of an irreducible right-resolving labeled graph.

    A start vertex plus a label-ordered BFS fixes a numbering; the form is the
    minimum over start vertices of the sorted numbered edge list.
    """
    if not g.is_right_resolving():
        raise ValidationError("canonical_form needs a right-resolving graph")
    labels = sorted({e.label for e in g.edges})
    best = None
    for s in range(g.n):
        num = {s: 0}
        q = deque([s])
        while q:
            v = q.popleft()
            for a in labels:
                t = g.step[v].get(a)
                if t and t[0] not in num:
                    num[t[0]] = len(num)
                    q.append(t[0])
        if len(num) != g.n:
            continue
        form = (g.n, tuple(sorted((num[g.index[e.src]], e.label, num[g.index[e.dst]]) for e in g.edges)))
        if best is None or form < best:
            best = form
    if best is None:
        raise NotIrreducibleError("canonical_form needs an irreducible graph")
    return best


def isomorphic(g: LabeledGraph, h: LabeledGraph) -> bool:
    """Labeled-graph isomorphism for irreducible graphs resolving on one side."""
    if g.is_right_resolving() and h.is_right_resolving():
        return canonical_form(g) == canonical_form(h)
    if g.is_left_resolving() and h.is_left_resolving():
        return canonical_form(g.reversed()) == canonical_form(h.reversed())
    return False


def shifts_equal(A: ShiftHandle, B: ShiftHandle) -> bool:
    """Equality of irreducible sofic shifts via isomorphism of their Fischer covers."""
    if A.is_empty or B.is_empty:
        return A.is_empty and B.is_empty
    return canonical_form(fischer_cover(A).graph) == canonical_form(fischer_cover(B).graph)


def cover_report(F: FischerCover) -> dict:
    from .core import graph_period
    if F.side == "right":
        m = find_magic_word(F)
    else:
        rev = FischerCover(F.graph.reversed(), F.table, "right")
        m = find_magic_word(rev)[::-1]
    return {"states": F.n, "period": graph_period(F.graph), "magic_word_example": list(m)}


__all__ = [
    "SubsetAutomaton", "FischerCover", "MagicCheck", "NOT_IN_LANGUAGE", "Edge",
    "determinize", "fischer_cover", "left_fischer_cover", "is_magic", "is_synchronizing",
    "find_magic_word", "path_word", "canonical_form", "isomorphic", "shifts_equal",
    "cover_report", "subset_step", "refine", "is_irreducible",
]
