"""Embedding decision procedures returning three-valued verdicts.

Every comparison "q_m(Z) <= rhs(m) for all m divisible by p" is settled by
exact counts up to ``n_max`` and, beyond that, by a :class:`TailCertificate`:
an explicit upper bound on q_m(Z), an explicit lower bound on the right-hand
side, and a crossover after which the bounds separate for good.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from networkx.algorithms.isomorphism import MultiDiGraphMatcher

from .census import (
    census,
    cover_r,
    entropy,
    f_cycle_vertices,
    f_map,
    is_receptive,
    periodic_point_count,
    perron_data,
    right_resolving_presentation,
    sft_qn_oracle,
)
from .core import (
    SFT_EDGE_SHIFT,
    CoverSpec,
    LabeledGraph,
    ShiftHandle,
    graph_period,
    higher_block,
    lyndon_words,
    scc_decompose,
    trim,
    word_str,
)
from .errors import EmptyShiftError, NotIrreducibleError, PreconditionError
from .period import is_p_periodic, is_sft_presentation
from .presentation import find_magic_word, fischer_cover, path_word
from .structure import component_tree, derived_shift
from .verdict import NO, UNKNOWN, YES, Verdict3, conjunction

DEFAULT_NMAX = 10
HORIZON = 400  # largest m the intermediate integer bounds are evaluated at


# ---------------------------------------------------------------------------
# integer matrix helpers


def _int_matrix(g: LabeledGraph, verts=None):
    verts = list(g.vertices) if verts is None else list(verts)
    pos = {v: i for i, v in enumerate(verts)}
    A = [[0] * len(verts) for _ in verts]
    for e in g.edges:
        if e.src in pos and e.dst in pos:
            A[pos[e.src]][pos[e.dst]] += 1
    return np.array(A, dtype=object), verts


def _powers(A, m_max: int) -> list:
    out = [np.identity(A.shape[0], dtype=object)]
    for _ in range(m_max):
        out.append(out[-1].dot(A))
    return out


# ---------------------------------------------------------------------------
# tail certificates


@dataclass
class ZSideBound:
    """q_m(Z) <= sum_K C_K * mu_K^m for m > finite_max (rational C_K, mu_K)."""

    pieces: list          # [(C_K, mu_K)]
    finite_max: int       # longest simple-cycle component (0 if none)
    vectors: list = field(default_factory=list)  # positive x_K with A_K x_K <= mu_K x_K
    supports: list = field(default_factory=list)  # vertex lists of the pieces
    mats: list = field(default_factory=list, repr=False)
    cycles: list = field(default_factory=list, repr=False)

    def integer_bound(self, m: int) -> int:
        """Exact path-count bound on q_m(Z)."""
        total = 0
        for A in self.mats:
            P = np.linalg.matrix_power(A, m) if m else np.identity(A.shape[0], dtype=object)
            total += int(P.sum())
        total += sum(L for L in self.cycles if L % m == 0)
        return total

    def to_dict(self) -> dict:
        return {"pieces": [{"C": C, "mu": mu, "x": list(x), "vertices": list(vs)}
                           for (C, mu), x, vs in zip(self.pieces, self.vectors, self.supports)],
                "finite_max": self.finite_max,
                "presentation": [list(t) for t in getattr(self, "triples", [])]}


def z_side_bound(Z: ShiftHandle) -> ZSideBound:
    # right-resolving: one closed path per periodic point up to the degree,
    # so the bound is far tighter than on an arbitrary presentation
    g = right_resolving_presentation(Z)
    pieces, mats, cycles, vecs, sups = [], [], [], [], []
    for comp in scc_decompose(g):
        if not comp.cycle_bearing:
            continue
        inner = [e for e in g.edges if e.src in comp.vertices and e.dst in comp.vertices]
        if len(inner) == len(comp.vertices):
            cycles.append(len(comp.vertices))
            continue
        verts = [v for v in g.vertices if v in comp.vertices]
        A, _ = _int_matrix(g, verts)
        x, mu = _compact_perron(A, verts)
        pieces.append((sum(x) / min(x), mu))
        vecs.append(x)
        mats.append(A)
        sups.append(verts)
    zb = ZSideBound(pieces, max(cycles, default=0), vecs, sups, mats, cycles)
    zb.triples = [(e.src, e.dst, e.label) for e in g.edges]
    return zb


@dataclass
class SideBound:
    """Lower bound rhs(m) >= f_c(m - l0) - D(m) on a right-resolving graph."""

    graph: LabeledGraph
    c: int
    l0: int
    p: int
    label: str

    def __post_init__(self):
        self.A, _ = _int_matrix(self.graph)
        self._pow = [np.identity(self.A.shape[0], dtype=object)]

    def power(self, m: int):
        while len(self._pow) <= m:
            self._pow.append(self._pow[-1].dot(self.A))
        return self._pow[m]

    def f(self, m: int) -> int:
        return int(self.power(m)[self.c, self.c]) if m >= 0 else 0

    def words_from_c(self, d: int) -> int:
        return int(self.power(d)[self.c].sum())

    def integer_bound(self, m: int) -> int:
        """Exact lower bound for a specific m (divisor-sum correction)."""
        bad = sum(self.words_from_c(d) for d in range(1, m // 2 + 1) if m % d == 0)
        return self.f(m - self.l0) - bad


@dataclass
class TailCertificate:
    """Proof that q_m(Z) <= rhs(m) for every multiple m of p with m >= crossover."""

    crossover: int
    q_side_bound: dict
    r_side_bound: dict
    intermediate: dict
    conclusion: str

    def to_dict(self) -> dict:
        return {"crossover": self.crossover, "q_side_bound": self.q_side_bound,
                "r_side_bound": self.r_side_bound, "intermediate": self.intermediate,
                "conclusion": self.conclusion}


def _ceil_frac(x: float, den: int = 10 ** 12) -> Fraction:
    return Fraction(math.ceil(x * den), den)


def _floor_frac(x: float, den: int = 10 ** 12) -> Fraction:
    return Fraction(math.floor(x * den), den)


def _compact_perron(A, verts) -> tuple:
    """(x, mu) with A x <= mu x exactly, using small denominators.

    Float Perron data carries 2^52 denominators, which makes the L-th powers in
    the tail checks slow; rounding x and then taking the worst ratio keeps the
    inequality exact and the numbers short.
    """
    pd = perron_data(A, verts)
    lo = min(pd.x)
    x = [Fraction(round(float(v / lo) * 10 ** 6), 10 ** 6) for v in pd.x]
    n = len(x)
    ratio = max(sum(int(A[i, j]) * x[j] for j in range(n)) / x[i] for i in range(n))
    mu = _ceil_frac(float(ratio), 10 ** 9)
    if mu < ratio:
        mu += Fraction(1, 10 ** 9)
    return x, mu


def _analytic_tail(zb: ZSideBound, sb: SideBound, L: int):
    """Try to certify the tail with block length L; returns (m0, record) or None."""
    B = sb.f(L)
    if B < 2:
        return None
    p = sb.p
    rs = [r for r in range(L, 2 * L) if r % p == 0]
    fr = {r: sb.f(r) for r in rs}
    if any(v == 0 for v in fr.values()):
        return None
    beta = B ** (1.0 / L)
    # K' <= f(r) / beta^(r + l0), verified exactly as K'^L * B^(r+l0) <= f(r)^L
    k_est = min(fr[r] / beta ** (r + sb.l0) for r in rs) * (1 - 1e-9)
    K = _floor_frac(k_est, 10 ** 6)
    if K <= 0 or any(K ** L * B ** (r + sb.l0) > fr[r] ** L for r in rs):
        return None
    if not hasattr(sb, "_perron"):
        sb._perron = _compact_perron(sb.A, list(sb.graph.vertices))
    x, gamma = sb._perron
    C = max(x) / min(x)
    if gamma <= 1:
        return None
    Cp = C * gamma / (gamma - 1)
    r2 = _ceil_frac(float(gamma) ** 0.5 / beta * (1 + 1e-9), 10 ** 6)
    if r2 >= 1 or r2 ** (2 * L) * B ** 2 < gamma ** L:
        return None
    rks = []
    for CK, mu in zb.pieces:
        rk = _ceil_frac(float(mu) / beta * (1 + 1e-9), 10 ** 6)
        if rk >= 1 or rk ** L * B < mu ** L:
            return None
        rks.append((CK, rk))
    # smallest admissible m0 (multiple of p, m0 - l0 >= 2L, m0 > finite_max)
    lo = max(2 * L + sb.l0, zb.finite_max + 1)
    m0 = lo + (-lo) % p

    def rhs_below_K(m):
        # exact, without Fraction normalisation: sum of n_i/d_i < K
        terms = [Cp * Fraction(1, 1)] + [CK for CK, _ in rks]
        bases = [r2] + [rk for _, rk in rks]
        num, den = 0, 1
        for t, b in zip(terms, bases):
            tn, td = t.numerator * b.numerator ** m, t.denominator * b.denominator ** m
            num, den = num * td + tn * den, den * td
        return num * K.denominator < K.numerator * den

    # bracket in floats, then confirm exactly
    m = m0
    while m < 100000:
        val = float(Cp) * float(r2) ** m + sum(float(CK) * float(rk) ** m for CK, rk in rks)
        if val < float(K) * (1 - 1e-9):
            break
        m += p
    else:
        return None
    while not rhs_below_K(m):
        m += p
    rec = {"graph": sb.label, "c": sb.graph.vertices[sb.c], "l0": sb.l0, "L": L, "B": B,
           "K": K, "gamma": gamma, "x": list(x), "C_div": Cp, "r2": r2,
           "r_pieces": [{"C": CK, "r": rk} for CK, rk in rks]}
    return m, rec


def certify_tail(zb: ZSideBound, sb: SideBound | None, start: int, exact=None,
                 exact_limit: int = 0) -> TailCertificate | None:
    """Certify q_m(Z) <= rhs(m) for all multiples m of p with m >= start.

    ``exact(m)`` (optional) returns the true pair (q_m(Z), rhs(m)) and is used
    for intermediate m up to ``exact_limit`` where the integer bounds do not
    separate.
    """
    p = sb.p if sb is not None else 1
    if not zb.pieces:
        # finite Z: nothing beyond the longest cycle
        if zb.finite_max < start:
            return TailCertificate(start, zb.to_dict(), {"p": p, "start": start}, {},
                                   "Z is finite; q_m(Z) = 0 beyond its longest cycle")
        m0 = zb.finite_max + 1
        rec = {"graph": sb.label if sb else None, "note": "finite Z"}
    else:
        if sb is None:
            return None
        best = None
        for L in range(p, 40 * p + 1, p):
            res = _analytic_tail(zb, sb, L)
            if res and (best is None or res[0] < best[0]):
                best = res
        if best is None:
            return None
        m0, rec = best
    rec.update(p=p, start=start)
    inter = {}
    first = start + (-start) % p
    for m in range(first, m0, p):
        if m > HORIZON:
            return None
        zq = zb.integer_bound(m)
        lb = sb.integer_bound(m) if sb is not None else -1
        if zq <= lb:
            inter[m] = {"q_bound": zq, "rhs_bound": lb}
            continue
        if exact is None or m > exact_limit:
            return None
        q, r = exact(m)
        if q > r:
            return None
        inter[m] = {"q": q, "rhs": r, "exact": True}
    if not zb.pieces:
        return TailCertificate(m0, zb.to_dict(), rec, inter, "Z is finite; remaining m checked")
    return TailCertificate(m0, zb.to_dict(), rec, inter,
                           f"q_m(Z) <= {sb.label}(m) for all multiples m of {p} with m >= {start}")


def magic_loop(F) -> tuple:
    """(c, word): a closed walk at vertex c of the Fischer cover whose label contains a magic word."""
    m = find_magic_word(F)
    (c,) = F.image(range(F.n), m)
    v = next(u for u in range(F.n) if F.run(u, m) is not None)
    loop = path_word(F, c, v) + tuple(m)
    assert F.run(c, loop) == c
    return c, loop


# ---------------------------------------------------------------------------
# shared condition evaluators


def _entropy_condition(Z: ShiftHandle, T: ShiftHandle) -> tuple:
    """(verdict for h(Z) < h(T), enclosures); NO only when h(Z) > h(T) strictly."""
    hT = entropy(T)
    if Z.is_empty:
        return Verdict3.yes({"h_Z": "empty", "h_target": hT}), None, hT
    hZ = entropy(Z)
    if hZ.upper < hT.lower:
        return Verdict3.yes({"h_Z": hZ, "h_target": hT}), hZ, hT
    if hZ.lower > hT.upper:
        return Verdict3.no({"kind": "ENTROPY", "h_Z_lower": hZ.lower, "h_target_upper": hT.upper}), hZ, hT
    return Verdict3.unknown(notes=["entropy enclosures overlap"]), hZ, hT


def _count_condition(Z: ShiftHandle, p: int, n_max: int, rhs, rhs_name: str,
                     sb: SideBound | None, exact_limit: int = 0) -> Verdict3:
    checked = {}
    for m in range(p, n_max + 1, p):
        q = periodic_point_count(Z, m)
        r = rhs(m)
        checked[m] = (q, r)
        if q > r:
            return Verdict3.no({"kind": "COUNT", "n": m, "q": q, "rhs": r, "rhs_name": rhs_name},
                               checked_up_to=m)
    if Z.is_empty:
        return Verdict3.yes({"checked": checked, "tail": "empty Z"}, n_max)
    zb = z_side_bound(Z)

    def exact(m):
        return periodic_point_count(Z, m), rhs(m)

    tail = certify_tail(zb, sb, n_max + 1, exact, exact_limit)
    if tail is None:
        return Verdict3.unknown(n_max, [f"no tail certificate for q(Z) <= {rhs_name} beyond n={n_max}"],
                                certificate={"checked": checked})
    return Verdict3.yes({"checked": checked, "tail": tail}, n_max)


def _graph_iso(g: LabeledGraph, h: LabeledGraph):
    G1, G2 = g.digraph(), h.digraph()
    if G1.number_of_edges() != G2.number_of_edges() or G1.number_of_nodes() != G2.number_of_nodes():
        return None
    M = MultiDiGraphMatcher(G1, G2)
    if M.is_isomorphic():
        return dict(M.mapping)
    return None


def conjugacy_witness(Z: ShiftHandle, Y: ShiftHandle, m_max: int = 2):
    """Bounded search for a conjugacy between two SFTs: isomorphic higher-block edge graphs."""
    if Z.is_empty or Y.is_empty or not (Z.is_irreducible() and Y.is_irreducible()):
        return None
    if not (is_sft_presentation(Z) and is_sft_presentation(Y)):
        return None
    gz, gy = fischer_cover(Z).graph, fischer_cover(Y).graph
    for mz, my in [(0, 0)] + [(k, 0) for k in range(1, m_max + 1)] + [(0, k) for k in range(1, m_max + 1)]:
        hz = higher_block(gz, mz)[0]
        hy = higher_block(gy, my)[0]
        iso = _graph_iso(hz, hy)
        if iso is not None:
            return {"kind": "CONJUGATE", "m_Z": mz, "m_target": my, "vertex_map": iso}
    return None


def _irreducible_target(Y: ShiftHandle, what: str):
    if not Y.is_irreducible():
        raise NotIrreducibleError(f"{what} must be irreducible")


# ---------------------------------------------------------------------------
# decision procedures


def decide_embed_irreducible_sft(Z: ShiftHandle, W: ShiftHandle, n_max: int = DEFAULT_NMAX) -> Verdict3:
    """Embedding of ``Z`` into the irreducible SFT ``W``.

    Either a conjugacy witness, or the entropy gap, p-periodicity and the
    counts q_{np}(Z) <= q_{np}(W) for all n.
    """
    _irreducible_target(W, "W")
    if W.kind == SFT_EDGE_SHIFT:
        gw = W.presentation
    elif is_sft_presentation(W):
        gw = fischer_cover(W).graph
    else:
        raise PreconditionError("W must be an SFT")
    Wedge = ShiftHandle.of(gw.relabel(lambda e: f"e{e.id}", [f"e{e.id}" for e in gw.edges]), W.name)
    if Z.is_empty:
        return Verdict3.yes({"kind": "EMPTY"})
    conj = conjugacy_witness(Z, W)
    if conj:
        return Verdict3.yes(conj, notes=["conjugate"])
    p = graph_period(gw)
    sb = SideBound(gw, 0, 0, p, "q(W)")
    counts = _count_condition(Z, p, n_max, lambda m: sft_qn_oracle(Wedge, m), "q(W)", sb, exact_limit=max(n_max + 4, 24))
    if counts.verdict == NO:
        return counts
    per = is_p_periodic(Z, p)
    ent = _entropy_condition(Z, W)[0]
    v = conjunction([("counts", counts), ("periodic", per), ("entropy", ent)])
    v.checked_up_to = n_max
    return v


def decide_embed_through_cover(Z: ShiftHandle, pi: CoverSpec, n_max: int = DEFAULT_NMAX) -> Verdict3:
    """Embedding of ``Z`` into the image of ``pi`` that factors through ``pi``."""
    Y = pi.codomain
    p = graph_period(pi.graph)
    if Z.is_empty:
        return Verdict3.yes({"kind": "EMPTY"})
    g = pi.graph
    sb = SideBound(g, 0, 0, p, "r(pi)") if g.is_right_resolving() else None
    counts = _count_condition(Z, p, n_max, lambda m: m * len(cover_r(g, m)), "r(pi)", sb, exact_limit=max(n_max + 4, 16))
    if counts.verdict == NO:
        return counts
    per = is_p_periodic(Z, p)
    if per.verdict == NO:
        return Verdict3.no(dict(per.witness, condition="periodic"))
    ent, hZ, hY = _entropy_condition(Z, Y)
    if ent.verdict == YES:
        v = conjunction([("counts", counts), ("periodic", per), ("entropy", ent)])
        v.checked_up_to = n_max
        return v
    if ent.verdict == NO:
        return ent
    # h(Z) = h(Y) is possible: only an explicit conjugacy plus a section settles it
    from .verify import fiber_product
    conj = conjugacy_witness(Z, Y)
    if conj and all(a == b for _, _, a, b in fiber_product(g).edges):
        return Verdict3.yes({"kind": "CONJUGATE_WITH_SECTION", "conjugacy": conj,
                             "section": "the cover is injective"}, n_max)
    return Verdict3.unknown(n_max, ["equal entropy possible and no section witness found"])


def _rec_counts(Y: ShiftHandle, n_max: int):
    t = Y.cached(("census", n_max), lambda: census(Y, n_max))
    return t


def decide_s_factorizable(Z: ShiftHandle, Y: ShiftHandle, n_max: int = DEFAULT_NMAX) -> Verdict3:
    """S-factorizable embedding of ``Z`` into the irreducible sofic ``Y``.

    Conditions: conjugate SFTs, or per(Y)-periodicity, q_{np}(Z) <= rec_{np}(Y)
    for all n, and h(Z) < h(Y).
    """
    _irreducible_target(Y, "Y")
    if Z.is_empty:
        return Verdict3.yes({"kind": "EMPTY"})
    conj = conjugacy_witness(Z, Y)
    if conj:
        return Verdict3.yes(conj, notes=["conjugate SFTs"])
    F = fischer_cover(Y)
    p = graph_period(F.graph)
    table = _rec_counts(Y, n_max)
    c, loop = magic_loop(F)
    sb = SideBound(F.graph, c, len(loop), p, "rec(Y)")

    limit = max(n_max + 4, 18)
    cache = {}

    def rec(m):
        if m <= n_max:
            return table.rec[m]
        if "far" not in cache:
            cache["far"] = census(Y, limit).rec
        return cache["far"][m] if m <= limit else census(Y, m).rec[m]

    counts = _count_condition(Z, p, n_max, rec, "rec(Y)", sb, exact_limit=limit)
    if counts.verdict == NO:
        return counts
    per = is_p_periodic(Z, p)
    ent = _entropy_condition(Z, Y)[0]
    v = conjunction([("counts", counts), ("periodic", per), ("entropy", ent)])
    v.checked_up_to = n_max
    return v


def decide_factorizable(Z: ShiftHandle, Y: ShiftHandle, n_max: int = DEFAULT_NMAX) -> Verdict3:
    """Factorizable (equivalently I-factorizable) embedding, tested component by component."""
    _irreducible_target(Y, "Y")
    tree = component_tree(Y)
    dY = derived_shift(Y)
    comps = tree.components
    fast = False
    if not Z.is_empty and not dY.is_empty:
        hZ, hd = entropy(Z), entropy(dY)
        if hZ.lower > hd.upper:
            comps = comps[:1]
            fast = True
    elif not Z.is_empty and dY.is_empty:
        comps = comps[:1]
        fast = True
    results = []
    for comp in comps:
        v = decide_s_factorizable(Z, comp.closure, n_max)
        results.append((comp, v))
        if v.verdict == YES:
            return Verdict3.yes({"kind": "COMPONENT", "level": comp.level, "index": comp.index,
                                 "component": comp.closure.name, "sub": v.certificate}, n_max,
                                notes=(["top component only (h(Z) > h(dY))"] if fast else []) + v.notes)
    report = [{"level": c.level, "index": c.index, "verdict": v.verdict,
               "witness": v.witness, "notes": v.notes} for c, v in results]
    if all(v.verdict == NO for _, v in results):
        return Verdict3.no({"kind": "ALL_COMPONENTS", "components": report}, n_max)
    return Verdict3.unknown(n_max, ["some component undecided"], certificate={"components": report})


def first_receptive_point(Y: ShiftHandle, n_max: int = 8):
    F = fischer_cover(Y)
    for n in range(1, n_max + 1):
        for w in lyndon_words(F.graph.labels_used(), n):
            if f_cycle_vertices(f_map(F, w)) and is_receptive(Y, w)[0]:
                return w
    return None


def decide_ai_factorizable(Z: ShiftHandle, Y: ShiftHandle, n_max: int = DEFAULT_NMAX,
                           build_cover: bool = True) -> Verdict3:
    """AI-factorizable embedding; same verdict as S-factorizable when h(Z) < h(Y)."""
    _irreducible_target(Y, "Y")
    ent = _entropy_condition(Z, Y)[0]
    if ent.verdict != YES:
        raise PreconditionError("AI-factorizability is decided here only under a certified h(Z) < h(Y)")
    v = decide_s_factorizable(Z, Y, n_max)
    if v.verdict == YES and build_cover:
        from .forge import ai_sft_cover
        xi = first_receptive_point(Y)
        if xi is not None:
            res = ai_sft_cover(Y, xi)
            v.certificate = {"s_factorizable": v.certificate,
                             "ai_cover": {"xi": word_str(xi), "validation": res.validation,
                                          "states": res.cover.graph.n,
                                          "edges": len(res.cover.graph.edges)}}
            v.notes.append("almost invertible SFT cover attached")
    return v


DECIDERS = {
    "sft-embed": decide_embed_irreducible_sft,
    "through-cover": decide_embed_through_cover,
    "s-fact": decide_s_factorizable,
    "factorizable": decide_factorizable,
    "ai-fact": decide_ai_factorizable,
}

__all__ = ["TailCertificate", "ZSideBound", "SideBound", "z_side_bound", "certify_tail",
           "conjugacy_witness", "decide_embed_irreducible_sft", "decide_embed_through_cover",
           "decide_s_factorizable", "decide_factorizable", "decide_ai_factorizable", "DECIDERS",
           "magic_loop", "UNKNOWN", "EmptyShiftError", "trim"]
