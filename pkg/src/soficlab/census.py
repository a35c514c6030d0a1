"""Periodic-point counts, receptivity and certified entropy enclosures.

All counts are point counts: an orbit of least period n contributes n.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
from sympy import divisors, mobius

from .core import (
    SFT_EDGE_SHIFT,
    CoverSpec,
    LabeledGraph,
    PrimitiveWord,
    ShiftHandle,
    as_word,
    is_irreducible,
    lyndon_words,
    scc_decompose,
    subgraph,
    trim,
    word_str,
)
from .errors import BudgetExceeded, EmptyShiftError, PreconditionError, ZeroEntropyError
from .presentation import FischerCover, determinize, find_magic_word, fischer_cover, path_word

DEFAULT_BUDGET = 10 ** 8
DEFAULT_STATE_CAP = 10 ** 6


# ---------------------------------------------------------------------------
# periodic membership


def f_map(F: FischerCover, w) -> tuple:
    """The partial map f_w on cover vertices (None where w cannot be read)."""
    return tuple(F.run(v, w) for v in range(F.n))


def f_cycle_vertices(f: tuple) -> frozenset:
    """Vertices on cycles of a partial function given as a tuple."""
    n = len(f)
    out = set()
    for v in range(n):
        x = v
        for _ in range(n):
            if x is None:
                break
            x = f[x]
        if x is not None:
            out.add(x)
    # close under f: images of cyclic points are cyclic
    todo = list(out)
    while todo:
        y = f[todo.pop()]
        if y not in out:
            out.add(y)
            todo.append(y)
    return frozenset(out)


def periodic_in_graph(g: LabeledGraph, w) -> bool:
    """Is ``w^inf`` presented by ``g``?  Works for any presentation.

    True iff the relation "v reaches u reading w" has a cycle.
    """
    w = tuple(w)
    rel = []
    for v in range(g.n):
        S = {v}
        for a in w:
            S = {j for i in S for j in g.step[i].get(a, ())}
            if not S:
                break
        rel.append(S)
    # cycle detection in the relation digraph
    color = [0] * g.n

    for root in range(g.n):
        if color[root]:
            continue
        stack = [(root, iter(rel[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = 2
                stack.pop()
            elif color[nxt] == 1:
                return True
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(rel[nxt])))
    return False


def contains_periodic(Y: ShiftHandle, w) -> bool:
    """Membership of ``w^inf`` in ``Y``.

    For irreducible ``Y`` this reads ``w`` on the Fischer cover and looks for
    a cycle of f_w; reducible presentations fall back to the relation test.
    """
    if Y.is_empty:
        return False
    word = w.word if isinstance(w, PrimitiveWord) else as_word(w, Y.alphabet)
    if Y.is_irreducible():
        return bool(f_cycle_vertices(f_map(fischer_cover(Y), word)))
    return periodic_in_graph(Y.presentation, word)


# ---------------------------------------------------------------------------
# receptivity


@dataclass(frozen=True)
class ReceptivityWitness:
    m1: tuple
    m2: tuple
    collapse_vertex: str
    cycle: tuple
    preperiod: int = 0

    def to_dict(self) -> dict:
        return {"m1": word_str(self.m1), "m2": word_str(self.m2),
                "collapse_vertex": self.collapse_vertex, "cycle": list(self.cycle),
                "preperiod": self.preperiod}


def _f_cycles(f: tuple) -> list:
    cyc = f_cycle_vertices(f)
    seen = set()
    out = []
    for v in sorted(cyc):
        if v in seen:
            continue
        c = [v]
        seen.add(v)
        x = f[v]
        while x != v:
            c.append(x)
            seen.add(x)
            x = f[x]
        out.append(tuple(c))
    return out


def is_receptive(Y: ShiftHandle, w, state_cap: int = DEFAULT_STATE_CAP):
    """Decide receptivity of the periodic point ``w^inf``.

    Parameters
    ----------
    Y : ShiftHandle
        Irreducible sofic shift.
    w : PrimitiveWord or word-like
    state_cap : int
        Cap on explored product states; exceeding it raises BudgetExceeded.

    Returns
    -------
    (bool, ReceptivityWitness or None)

    Notes
    -----
    In the Fischer cover every vertex is the collapse point of some magic
    word, and the preperiod of an f_w orbit can be absorbed into m1.  So the
    point is receptive iff some cycle C of f_w admits a word m2 readable from
    every vertex of C while collapsing the full vertex set to one vertex.
    """
    F = fischer_cover(Y)
    word = w.word if isinstance(w, PrimitiveWord) else as_word(w, Y.alphabet)
    f = f_map(F, word)
    alphabet = F.graph.alphabet
    full = frozenset(range(F.n))
    explored = 0
    for C in _f_cycles(f):
        # m2 must be non-empty, so the search is seeded with one-letter moves
        root = "root"
        prev = {}
        q = deque([root])
        hit = None
        while q:
            state = q.popleft()
            if state is not root and len(state[1]) == 1:
                hit = state
                break
            verts, S = (tuple(C), full) if state is root else state
            for a in alphabet:
                nv = tuple(F.table.get((v, a)) for v in verts)
                if None in nv:
                    continue
                T = frozenset(F.table[(v, a)] for v in S if (v, a) in F.table)
                nxt = (nv, T)
                if nxt not in prev:
                    prev[nxt] = (state, a)
                    q.append(nxt)
                    explored += 1
                    if explored > state_cap:
                        raise BudgetExceeded("receptivity search exceeded its state cap")
        if hit is None:
            continue
        m2 = []
        st = hit
        while st is not root:
            st, a = prev[st]
            m2.append(a)
        m2 = tuple(reversed(m2))
        c0 = C[0]
        m1 = find_magic_word(F, target=c0)
        names = F.graph.vertices
        return True, ReceptivityWitness(m1, m2, names[c0], tuple(names[v] for v in C), 0)
    return False, None


def validate_receptivity_witness(Y: ShiftHandle, w, wit: ReceptivityWitness, k_max: int = 10) -> bool:
    """Replay m1 w^k m2 membership for k = 1..k_max by brute path search."""
    from .verify import in_language
    word = w.word if isinstance(w, PrimitiveWord) else as_word(w, Y.alphabet)
    F = fischer_cover(Y)
    from .presentation import is_magic
    if not (is_magic(F, wit.m1) and is_magic(F, wit.m2)):
        return False
    return all(in_language(Y.presentation, tuple(wit.m1) + tuple(word) * k + tuple(wit.m2))
               for k in range(1, k_max + 1))


# ---------------------------------------------------------------------------
# census


@dataclass
class CensusTable:
    n_max: int
    q: dict = field(default_factory=dict)
    s: dict = field(default_factory=dict)
    rec: dict = field(default_factory=dict)
    r: dict | None = None

    def to_dict(self) -> dict:
        out = {}
        for n in range(1, self.n_max + 1):
            row = {}
            if n in self.q:
                row["q"] = self.q[n]
            if n in self.s:
                row["s"] = self.s[n]
            if n in self.rec:
                row["rec"] = self.rec[n]
            if self.r is not None and n in self.r:
                row["r"] = self.r[n]
            out[str(n)] = row
        return out

    def column(self, key: str) -> list:
        d = getattr(self, key)
        return [d.get(n, 0) for n in range(1, self.n_max + 1)]


def language_size_bound(g: LabeledGraph, n_max: int) -> int:
    """Exact number of paths of length <= n_max: an upper bound on words enumerated."""
    A = g.adjacency()
    v = np.ones(g.n, dtype=object)
    total = 0
    for _ in range(n_max):
        v = A.dot(v)
        total += int(sum(v))
    return total


def _check_budget(g: LabeledGraph, n_max: int, budget: int):
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    naive = len(g.labels_used()) ** n_max
    if naive > budget and language_size_bound(g, n_max) > budget:
        raise BudgetExceeded(f"enumeration up to length {n_max} exceeds the budget {budget}")


def periodic_words(F: FischerCover, n: int):
    """Lyndon words of length n whose periodic point lies in the cover's shift."""
    full_set = frozenset(range(F.n))
    memo = {(): full_set}

    def prune(prefix):
        # the parent prefix was visited just before, so one step suffices
        S = memo.get(prefix[:-1])
        S = F.image(full_set if S is None else S, prefix if S is None else prefix[-1:])
        memo[prefix] = S
        return not S

    for w in lyndon_words(F.graph.labels_used(), n, prune):
        f = f_map(F, w)
        cyc = f_cycle_vertices(f)
        if cyc:
            yield w, f, cyc


def census(Y: ShiftHandle, n_max: int = 12, budget: int = DEFAULT_BUDGET,
           receptivity: bool = True) -> CensusTable:
    """Point counts q_n, s_n and rec_n for n = 1..n_max.

    Parameters
    ----------
    Y : ShiftHandle
        Irreducible sofic shift.
    n_max : int
        Largest least period counted.
    budget : int
        Cap on the number of enumerated words.
    receptivity : bool
        Skip the rec_n column when False (it is the expensive one).

    Returns
    -------
    CensusTable
    """
    F = fischer_cover(Y)
    _check_budget(F.graph, n_max, budget)
    table = CensusTable(n_max)
    for n in range(1, n_max + 1):
        q = s = rec = 0
        for w, f, cyc in periodic_words(F, n):
            q += n
            if len(cyc) == 1 and f[next(iter(cyc))] == next(iter(cyc)):
                s += n
            if receptivity and is_receptive(Y, w)[0]:
                rec += n
        table.q[n] = q
        table.s[n] = s
        if receptivity:
            table.rec[n] = rec
    return table


def periodic_point_count(Z: ShiftHandle, n: int, budget: int = DEFAULT_BUDGET) -> int:
    """q_n for any (possibly reducible) sofic shift, via its subset automaton."""
    if Z.is_empty:
        return 0
    if Z.is_irreducible():
        F = fischer_cover(Z)
        return n * sum(1 for _ in periodic_words(F, n))
    g = Z.presentation
    _check_budget(g, n, budget)
    D = determinize(g)
    full = 0

    def prune(prefix):
        return D.run(prefix, full) is None

    return n * sum(1 for w in lyndon_words(g.labels_used(), n, prune) if periodic_in_graph(g, w))


def periodic_points(Z: ShiftHandle, n: int) -> list:
    """Lyndon representatives of the orbits of least period n."""
    if Z.is_empty:
        return []
    g = Z.presentation
    D = determinize(g)

    def prune(prefix):
        return D.run(prefix, 0) is None

    return [w for w in lyndon_words(g.labels_used(), n, prune) if periodic_in_graph(g, w)]


def cover_r(g: LabeledGraph, n: int) -> list:
    """Lyndon words w of length n with a cycle of length n labeled w in ``g``."""
    full = tuple(range(g.n))

    def reach(prefix):
        rows = []
        for v in full:
            S = {v}
            for a in prefix:
                S = {j for i in S for j in g.step[i].get(a, ())}
                if not S:
                    break
            rows.append(S)
        return rows

    def prune(prefix):
        return not any(reach(prefix))

    out = []
    for w in lyndon_words(g.labels_used(), n, prune):
        rows = reach(w)
        if any(v in rows[v] for v in full):
            out.append(w)
    return out


def cover_census(pi: CoverSpec, n_max: int = 12, budget: int = DEFAULT_BUDGET,
                 with_codomain: bool = True) -> CensusTable:
    """Census of the codomain plus r_n(pi), the points with a preimage of the same least period."""
    _check_budget(pi.graph, n_max, budget)
    table = census(pi.codomain, n_max, budget) if with_codomain else CensusTable(n_max)
    table.r = {n: n * len(cover_r(pi.graph, n)) for n in range(1, n_max + 1)}
    return table


def sft_qn_oracle(X: ShiftHandle, n: int) -> int:
    """q_n of an edge shift by Moebius inversion of tr(A^d)."""
    if X.kind != SFT_EDGE_SHIFT:
        raise PreconditionError("sft_qn_oracle needs an edge shift (distinct labels)")
    A = X.presentation.adjacency()
    total = 0
    for d in divisors(n):
        mu = mobius(n // d)
        if mu:
            P = np.identity(A.shape[0], dtype=object)
            for _ in range(d):
                P = P.dot(A)
            total += int(mu) * int(np.trace(P))
    return total


# ---------------------------------------------------------------------------
# entropy


@dataclass(frozen=True)
class PerronData:
    """Certified data for one strongly connected piece: A x <= upper * x, A x >= lower * x."""

    vertices: tuple
    x: tuple  # positive rationals
    lower: Fraction
    upper: Fraction


@dataclass(frozen=True)
class EntropyEnclosure:
    lower: Fraction
    upper: Fraction
    lam_lower: Fraction
    lam_upper: Fraction
    zero: bool = False

    @property
    def mid(self) -> float:
        return float(self.lower + self.upper) / 2

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {"lower": float(self.lower), "upper": float(self.upper),
                "lower_exact": str(self.lower), "upper_exact": str(self.upper),
                "zero": self.zero}


LOG_MARGIN = Fraction(1, 10 ** 14)


def _perron_vector(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if n == 1:
        return np.ones(1)
    M = A.astype(float)
    vals, vecs = np.linalg.eig(M)
    k = int(np.argmax(vals.real))
    x = np.abs(vecs[:, k].real)
    B = M + np.identity(n)
    for _ in range(200):
        y = B @ x
        y /= y.max()
        if np.allclose(y, x, rtol=1e-15, atol=0):
            x = y
            break
        x = y
    return x


def perron_data(A_int, vertices) -> PerronData:
    """Collatz-Wielandt bounds for an irreducible non-negative integer matrix."""
    n = len(vertices)
    rows = [[(j, int(A_int[i, j])) for j in range(n) if A_int[i, j]] for i in range(n)]
    sums = {sum(c for _, c in r) for r in rows}
    # constant row sums: the all-ones vector is an exact eigenvector
    x = np.ones(n) if len(sums) == 1 else _perron_vector(np.array(A_int, dtype=float))
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        x = np.ones(n)
    xs = [Fraction(float(v)) for v in x]
    ratios = [sum(c * xs[j] for j, c in rows[i]) / xs[i] for i in range(n)]
    return PerronData(tuple(vertices), tuple(xs), min(ratios), max(ratios))


def spectral_pieces(g: LabeledGraph) -> list:
    """Perron data for every cycle-bearing strongly connected component of ``g``."""
    out = []
    A = g.adjacency()
    for comp in scc_decompose(g):
        if not comp.cycle_bearing:
            continue
        idx = sorted(g.index[v] for v in comp.vertices)
        sub = A[np.ix_(idx, idx)]
        out.append(perron_data(sub, [g.vertices[i] for i in idx]))
    return out


def _log_bounds(lo: Fraction, hi: Fraction) -> tuple:
    if lo == hi == 1:
        return Fraction(0), Fraction(0)
    llo = Fraction(math.log(float(lo))) - LOG_MARGIN if lo > 0 else None
    lhi = Fraction(math.log(float(hi))) + LOG_MARGIN
    return llo, lhi


def enclosure_from_pieces(pieces: list) -> EntropyEnclosure:
    if not pieces:
        raise EmptyShiftError("no cycles: the shift is empty")
    lo = max(p.lower for p in pieces)
    hi = max(p.upper for p in pieces)
    llo, lhi = _log_bounds(lo, hi)
    if llo is None:
        llo = Fraction(0)
    return EntropyEnclosure(llo, lhi, lo, hi, zero=(lo == hi == 1))


def right_resolving_presentation(Y: ShiftHandle) -> LabeledGraph:
    """Fischer cover for irreducible shifts, else the trimmed subset automaton."""
    if Y.is_irreducible():
        try:
            return fischer_cover(Y).graph
        except Exception:
            pass
    g = Y.presentation
    D = determinize(g)
    triples = [(str(s), str(t), a) for (s, a), t in sorted(D.trans.items(), key=lambda kv: kv[0][0])]
    dg = LabeledGraph.build(triples, alphabet=g.alphabet, vertices=[str(i) for i in range(len(D.states))])
    return trim(dg)


def entropy(Y: ShiftHandle, tol: Fraction | float = Fraction(1, 10 ** 9)) -> EntropyEnclosure:
    """Certified enclosure of h(Y) = log(Perron root) of a right-resolving presentation.

    Parameters
    ----------
    Y : ShiftHandle
    tol : rational
        Maximal accepted width of the enclosure.

    Returns
    -------
    EntropyEnclosure
        ``zero`` is set when the Perron root is exactly 1.

    Examples
    --------
    >>> from soficlab.corpus import even_shift
    >>> e = entropy(even_shift())
    >>> round(e.mid, 6)
    0.481212
    """
    if Y.is_empty:
        raise EmptyShiftError("the empty shift has no entropy")
    g = Y.cached("rr", lambda: right_resolving_presentation(Y))
    enc = Y.cached("entropy", lambda: enclosure_from_pieces(spectral_pieces(g)))
    if enc.width > Fraction(tol):
        raise BudgetExceeded(f"entropy enclosure width {float(enc.width):.3g} exceeds tol")
    return enc


def graph_entropy(g: LabeledGraph) -> EntropyEnclosure:
    """Entropy of the edge shift of ``g`` (log of the spectral radius of its adjacency)."""
    return enclosure_from_pieces(spectral_pieces(trim(g)))


def require_positive_entropy(Y: ShiftHandle) -> EntropyEnclosure:
    enc = entropy(Y)
    if enc.zero or enc.lower <= 0:
        raise ZeroEntropyError("the construction needs positive entropy")
    return enc


# ---------------------------------------------------------------------------
# repetition-free path counts


def kmp_automaton(pattern: tuple, alphabet) -> dict:
    """Transition table (state, symbol) -> state of the factor automaton for ``pattern``."""
    m = len(pattern)
    fail = [0] * (m + 1)
    k = 0
    for i in range(1, m):
        while k and pattern[i] != pattern[k]:
            k = fail[k]
        if pattern[i] == pattern[k]:
            k += 1
        fail[i + 1] = k
    table = {}
    for s in range(m):
        for a in alphabet:
            k = s
            while k and pattern[k] != a:
                k = fail[k]
            table[(s, a)] = k + 1 if pattern[k] == a else 0
    return table


def count_repetition_free_paths(g: LabeledGraph, v1, v2, j: int, n: int, ubar,
                                budget: int = DEFAULT_BUDGET) -> int:
    """Number of label words of length-j paths from v1 to v2 avoiding ``ubar^(2n)``.

    Counts distinct label words, not paths: the product of the subset
    automaton started at {v1} with a factor automaton for the forbidden power
    is deterministic, so words and product runs are in bijection.
    """
    ubar = tuple(ubar)
    if n < 1 or not ubar:
        raise PreconditionError("need n >= 1 and a non-empty ubar")
    pattern = ubar * (2 * n)
    alphabet = g.labels_used()
    kmp = kmp_automaton(pattern, alphabet)
    m = len(pattern)
    i1, i2 = g.index[v1], g.index[v2]
    layer = {(frozenset([i1]), 0): 1}
    for _ in range(j):
        nxt = {}
        for (S, k), c in layer.items():
            for a in alphabet:
                T = frozenset(t for i in S for t in g.step[i].get(a, ()))
                if not T:
                    continue
                k2 = kmp[(k, a)] if m else 1
                if k2 >= m:
                    continue
                key = (T, k2)
                nxt[key] = nxt.get(key, 0) + c
        layer = nxt
        if len(layer) > budget:
            raise BudgetExceeded("product automaton too large")
    return sum(c for (S, k), c in layer.items() if i2 in S)


def repetition_free_words(g: LabeledGraph, v1, v2, j: int, n: int, ubar) -> list:
    """The label words counted by :func:`count_repetition_free_paths`, with the
    lexicographically least edge path realizing each (by edge id sequence)."""
    ubar = tuple(ubar)
    pattern = ubar * (2 * n)
    alphabet = g.labels_used()
    kmp = kmp_automaton(pattern, alphabet)
    m = len(pattern)
    i1, i2 = g.index[v1], g.index[v2]
    # forward search over (vertex, kmp state) paths; keep least path per (word, end)
    layer = {((), 0): {i1: ()}}
    for _ in range(j):
        nxt = {}
        for (w, k), ends in layer.items():
            for a in alphabet:
                k2 = kmp[(k, a)]
                if k2 >= m:
                    continue
                bucket = None
                for v, path in ends.items():
                    for eid, t, lab in g.succ[v]:
                        if lab != a:
                            continue
                        if bucket is None:
                            bucket = nxt.setdefault((w + (a,), k2), {})
                        cand = path + (eid,)
                        if t not in bucket or cand < bucket[t]:
                            bucket[t] = cand
        layer = nxt
    out = []
    for (w, k), ends in sorted(layer.items()):
        if i2 in ends:
            out.append((w, ends[i2]))
    return out


def gcd_of_support(d: dict) -> int:
    return reduce(math.gcd, (n for n, c in d.items() if c > 0), 0)
