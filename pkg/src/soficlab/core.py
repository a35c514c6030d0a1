"""Value types for labeled graphs, words and shift handles, plus the graph file format.

Every algorithm downstream consumes :class:`LabeledGraph`.  Vertices are
strings; edges carry stable integer ids so that iteration order, and hence
every reported witness, is deterministic.
"""

from __future__ import annotations

import json
import threading
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd
from typing import Callable, Iterable, Iterator, Sequence

import networkx as nx

from .errors import (
    EmptyShiftError,
    NotIrreducibleError,
    SchemaError,
    ValidationError,
)

Word = tuple  # tuple[str, ...]

RESERVED_PREFIX = "^"


# ---------------------------------------------------------------------------
# words


def as_word(text, alphabet: Sequence[str] | None = None) -> Word:
    """Turn user input into a word (tuple of symbols).

    Strings are split character by character when every symbol of the
    alphabet is a single character; otherwise on whitespace or commas.
    """
    if isinstance(text, tuple):
        return text
    if isinstance(text, list):
        return tuple(text)
    text = str(text)
    single = alphabet is None or all(len(a) == 1 for a in alphabet)
    if single and not any(c in text for c in " ,"):
        return tuple(text)
    return tuple(t for t in text.replace(",", " ").split() if t)


def word_str(w: Sequence[str]) -> str:
    if all(len(a) == 1 for a in w):
        return "".join(w)
    return " ".join(w)


def least_period(w: Sequence[str]) -> int:
    """Smallest d dividing len(w) with w == (w[:d]) ** (len(w)/d)."""
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and tuple(w[:d]) * (n // d) == tuple(w):
            return d
    return n


def is_primitive(w: Sequence[str]) -> bool:
    return len(w) > 0 and least_period(w) == len(w)


def least_rotation(w: Sequence[str], order: dict | None = None) -> Word:
    """Lexicographically least rotation of ``w`` (symbol order given by ``order``)."""
    w = tuple(w)
    if not w:
        return w
    key = (lambda s: tuple(order[a] for a in s)) if order else (lambda s: s)
    return min((w[i:] + w[:i] for i in range(len(w))), key=key)


def rotations(w: Sequence[str]) -> list:
    w = tuple(w)
    return [w[i:] + w[:i] for i in range(len(w))]


@dataclass(frozen=True)
class PrimitiveWord:
    """A primitive word ``w`` standing for the periodic point ``w^inf``."""

    word: Word
    canonical: bool = False

    def __post_init__(self):
        if not is_primitive(self.word):
            raise ValidationError(f"word {word_str(self.word)!r} is empty or a proper power")

    @classmethod
    def of(cls, w, alphabet=None) -> "PrimitiveWord":
        w = as_word(w, alphabet)
        return cls(w, w == least_rotation(w))

    @classmethod
    def canonical_of(cls, w, alphabet=None) -> "PrimitiveWord":
        return cls(least_rotation(as_word(w, alphabet)), True)

    def __len__(self):
        return len(self.word)

    def __str__(self):
        return word_str(self.word)


def lyndon_words(alphabet: Sequence[str], n: int,
                 prune: Callable[[Word], bool] | None = None) -> Iterator[Word]:
    """Yield the Lyndon words of length ``n`` (least rotations of primitive words).

    Uses the Fredricksen-Kessler-Maiorana recursion, so every partial word is
    a prenecklace prefix.  ``prune(prefix)`` returning True cuts the subtree,
    which lets callers skip prefixes outside a language.
    """
    k = len(alphabet)
    a = [0] * (n + 1)

    def gen(t, p):
        if t > n:
            if n % p == 0 and p == n:
                yield tuple(alphabet[i] for i in a[1:])
            return
        start = a[t - p]
        for j in range(start, k):
            a[t] = j
            if prune is not None and prune(tuple(alphabet[i] for i in a[1:t + 1])):
                continue
            yield from gen(t + 1, p if j == start else t)

    if n <= 0:
        return
    yield from gen(1, 1)


# ---------------------------------------------------------------------------
# labeled graphs


@dataclass(frozen=True)
class Edge:
    id: int
    src: str
    dst: str
    label: str


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """Finite directed multigraph with edge labels.

    Parameters
    ----------
    vertices : tuple of str
        Vertex names, in a fixed order.
    edges : tuple of Edge
        Edges with stable ids ``0..len(edges)-1``.
    alphabet : tuple of str
        Ordered symbol set; every label must belong to it.
    """

    vertices: tuple
    edges: tuple
    alphabet: tuple

    def __post_init__(self):
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("duplicate symbols in alphabet")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex names")
        vs = set(self.vertices)
        al = set(self.alphabet)
        for e in self.edges:
            if e.src not in vs or e.dst not in vs:
                raise ValidationError(f"edge {e.id} references an unknown vertex")
            if e.label not in al:
                raise ValidationError(f"edge {e.id} label {e.label!r} is outside the alphabet")

    # -- construction helpers ------------------------------------------------
    @classmethod
    def build(cls, triples: Iterable, alphabet: Sequence[str] | None = None,
              vertices: Sequence[str] | None = None) -> "LabeledGraph":
        """Build from ``(src, dst, label)`` triples, keeping first-seen vertex order."""
        triples = [tuple(map(str, t)) for t in triples]
        if vertices is None:
            seen = {}
            for s, d, _ in triples:
                seen.setdefault(s, None)
                seen.setdefault(d, None)
            vertices = list(seen)
        if alphabet is None:
            alphabet = sorted({t[2] for t in triples})
        edges = tuple(Edge(i, s, d, lab) for i, (s, d, lab) in enumerate(triples))
        return cls(tuple(map(str, vertices)), edges, tuple(alphabet))

    def triples(self) -> list:
        return [(e.src, e.dst, e.label) for e in self.edges]

    # -- cached indices -------------------------------------------------------
    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def succ(self) -> list:
        """Per vertex index: list of (edge id, dst index, label)."""
        out = [[] for _ in self.vertices]
        for e in self.edges:
            out[self.index[e.src]].append((e.id, self.index[e.dst], e.label))
        return out

    @cached_property
    def pred(self) -> list:
        inn = [[] for _ in self.vertices]
        for e in self.edges:
            inn[self.index[e.dst]].append((e.id, self.index[e.src], e.label))
        return inn

    @cached_property
    def step(self) -> list:
        """Per vertex index: dict label -> tuple of dst indices."""
        out = []
        for lst in self.succ:
            d = {}
            for _, j, a in lst:
                d.setdefault(a, []).append(j)
            out.append({a: tuple(v) for a, v in d.items()})
        return out

    @property
    def n(self) -> int:
        return len(self.vertices)

    def labels_used(self) -> tuple:
        used = {e.label for e in self.edges}
        return tuple(a for a in self.alphabet if a in used)

    def is_right_resolving(self) -> bool:
        return all(len(v) == 1 for d in self.step for v in d.values())

    def is_left_resolving(self) -> bool:
        return self.reversed().is_right_resolving()

    def reversed(self) -> "LabeledGraph":
        return LabeledGraph(self.vertices,
                            tuple(Edge(e.id, e.dst, e.src, e.label) for e in self.edges),
                            self.alphabet)

    def relabel(self, mapping: Callable[[Edge], str] | dict,
                alphabet: Sequence[str] | None = None) -> "LabeledGraph":
        f = mapping if callable(mapping) else (lambda e: mapping[e.label])
        edges = tuple(Edge(e.id, e.src, e.dst, f(e)) for e in self.edges)
        if alphabet is None:
            alphabet = tuple(dict.fromkeys(e.label for e in edges))
        return LabeledGraph(self.vertices, edges, tuple(alphabet))

    def adjacency(self):
        """Integer adjacency matrix (numpy, dtype=object so powers stay exact)."""
        import numpy as np
        A = np.zeros((self.n, self.n), dtype=object)
        for e in self.edges:
            A[self.index[e.src], self.index[e.dst]] += 1
        return A

    def digraph(self) -> nx.MultiDiGraph:
        G = nx.MultiDiGraph()
        G.add_nodes_from(self.vertices)
        for e in self.edges:
            G.add_edge(e.src, e.dst, key=e.id, label=e.label)
        return G

    def to_dict(self) -> dict:
        return {
            "type": "edge-labeled",
            "alphabet": list(self.alphabet),
            "vertices": list(self.vertices),
            "edges": [{"src": e.src, "dst": e.dst, "label": e.label} for e in self.edges],
        }

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (self.vertices == other.vertices and self.alphabet == other.alphabet
                and self.triples() == other.triples())

    def __hash__(self):
        return hash((self.vertices, self.alphabet, tuple(self.triples())))

    def __repr__(self):
        return f"LabeledGraph({self.n} vertices, {len(self.edges)} edges, alphabet={list(self.alphabet)})"


# ---------------------------------------------------------------------------
# file format


def _load(text) -> dict:
    if isinstance(text, dict):
        return text
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError("top level must be a JSON object")
    return data


def parse_presentation(text, allow_reserved: bool = False) -> LabeledGraph:
    """Parse a graph file into a :class:`LabeledGraph`.

    Parameters
    ----------
    text : str or dict
        JSON text (or an already decoded object) in the graph file schema.
    allow_reserved : bool
        Permit symbols with the reserved ``^`` prefix.  Only files written by
        the forge constructions should need this.

    Returns
    -------
    LabeledGraph

    Notes
    -----
    Vertex-labeled graphs become edge-labeled by copying the source vertex's
    label onto each outgoing edge.  The optional key ``"label_convention":
    "target"`` copies the target's label instead; both give the same
    two-sided shift.
    """
    data = _load(text)
    kind = data.get("type")
    if kind not in ("edge-labeled", "vertex-labeled"):
        raise SchemaError("'type' must be 'edge-labeled' or 'vertex-labeled'")
    for key in ("alphabet", "vertices", "edges"):
        if key not in data or not isinstance(data[key], list):
            raise SchemaError(f"missing list field {key!r}")
    alphabet = [str(a) for a in data["alphabet"]]
    if not alphabet:
        raise ValidationError("alphabet must be non-empty")
    if not allow_reserved and any(a.startswith(RESERVED_PREFIX) for a in alphabet):
        raise ValidationError(f"symbols starting with {RESERVED_PREFIX!r} are reserved")
    vertices = [str(v) for v in data["vertices"]]
    vlabels = None
    if kind == "vertex-labeled":
        vlabels = data.get("vertex_labels")
        if not isinstance(vlabels, dict):
            raise SchemaError("vertex-labeled graphs need a 'vertex_labels' object")
        missing = [v for v in vertices if v not in vlabels]
        if missing:
            raise ValidationError(f"vertices without labels: {missing}")
    convention = data.get("label_convention", "source")
    if convention not in ("source", "target"):
        raise SchemaError("'label_convention' must be 'source' or 'target'")
    triples = []
    for k, e in enumerate(data["edges"]):
        if not isinstance(e, dict) or "src" not in e or "dst" not in e:
            raise SchemaError(f"edge #{k} needs 'src' and 'dst'")
        s, d = str(e["src"]), str(e["dst"])
        if s not in vertices or d not in vertices:
            raise ValidationError(f"edge #{k} references an unknown vertex")
        if kind == "edge-labeled":
            if "label" not in e:
                raise SchemaError(f"edge #{k} needs a 'label'")
            lab = str(e["label"])
        else:
            lab = str(vlabels[s if convention == "source" else d])
        triples.append((s, d, lab))
    return LabeledGraph.build(triples, alphabet=alphabet, vertices=vertices)


def serialize_presentation(g: LabeledGraph) -> str:
    return json.dumps(g.to_dict(), sort_keys=True, indent=2)


def load_graph_file(path, allow_reserved: bool = False) -> LabeledGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read(), allow_reserved=allow_reserved)


# ---------------------------------------------------------------------------
# structural operations


def subgraph(g: LabeledGraph, keep_vertices=None, keep_edges=None) -> LabeledGraph:
    """Induced labeled subgraph (not trimmed); edge ids are renumbered."""
    kv = set(g.vertices if keep_vertices is None else keep_vertices)
    verts = tuple(v for v in g.vertices if v in kv)
    edges = [e for e in g.edges
             if e.src in kv and e.dst in kv and (keep_edges is None or keep_edges(e))]
    return LabeledGraph(verts, tuple(Edge(i, e.src, e.dst, e.label) for i, e in enumerate(edges)),
                        g.alphabet)


def essential_vertices(g: LabeledGraph) -> set:
    alive = set(g.vertices)
    changed = True
    while changed:
        changed = False
        outd = {v: 0 for v in alive}
        ind = {v: 0 for v in alive}
        for e in g.edges:
            if e.src in alive and e.dst in alive:
                outd[e.src] += 1
                ind[e.dst] += 1
        dead = {v for v in alive if outd[v] == 0 or ind[v] == 0}
        if dead:
            alive -= dead
            changed = True
    return alive


def trim(g: LabeledGraph) -> LabeledGraph:
    """Maximal essential subgraph: every vertex keeps an in-edge and an out-edge.

    Raises
    ------
    EmptyShiftError
        If nothing survives.
    """
    alive = essential_vertices(g)
    if not alive:
        raise EmptyShiftError("presentation has no bi-infinite path")
    if len(alive) == g.n:
        return g
    return subgraph(g, alive)


@dataclass(frozen=True)
class Component:
    vertices: frozenset
    cycle_bearing: bool


def scc_decompose(g: LabeledGraph) -> list:
    """Strongly connected components in topological order."""
    D = nx.DiGraph()
    D.add_nodes_from(g.vertices)
    loops = set()
    for e in g.edges:
        D.add_edge(e.src, e.dst)
        if e.src == e.dst:
            loops.add(e.src)
    C = nx.condensation(D)
    order = list(nx.lexicographical_topological_sort(
        C, key=lambda c: min(g.index[v] for v in C.nodes[c]["members"])))
    out = []
    for c in order:
        mem = frozenset(C.nodes[c]["members"])
        bearing = len(mem) > 1 or any(v in loops for v in mem)
        out.append(Component(mem, bearing))
    return out


def is_irreducible(g: LabeledGraph) -> bool:
    """True for a non-empty graph that is one strongly connected component with an edge."""
    if g.n == 0 or not g.edges:
        return False
    comps = scc_decompose(g)
    return len(comps) == 1 and comps[0].cycle_bearing


def graph_period(g: LabeledGraph) -> int:
    """Gcd of cycle lengths, via BFS depth layering from the first vertex."""
    if not is_irreducible(g):
        raise NotIrreducibleError("graph_period needs an irreducible graph")
    depth = bfs_depths(g)
    return reduce(gcd, (abs(depth[g.index[e.src]] + 1 - depth[g.index[e.dst]]) for e in g.edges), 0)


def bfs_depths(g: LabeledGraph, root: int = 0) -> list:
    depth = [-1] * g.n
    depth[root] = 0
    q = deque([root])
    while q:
        i = q.popleft()
        for _, j, _ in g.succ[i]:
            if depth[j] < 0:
                depth[j] = depth[i] + 1
                q.append(j)
    return depth


@dataclass(frozen=True)
class Recoding:
    """Conjugacy data for a higher-block recoding.

    ``windows[k]`` is the tuple of original edge ids read by new edge ``k``;
    ``middle[k]`` is the original edge at coordinate 0 (the map back).
    """

    m: int
    windows: tuple
    middle: tuple

    def forward(self, path: Sequence[int]) -> list:
        """Recode a finite original edge path; the result is shorter by 2m."""
        lookup = {w: k for k, w in enumerate(self.windows)}
        L = 2 * self.m + 1
        return [lookup[tuple(path[i:i + L])] for i in range(len(path) - L + 1)]

    def backward(self, path: Sequence[int]) -> list:
        return [self.middle[k] for k in path]


def _paths_of_length(g: LabeledGraph, L: int) -> list:
    paths = [()] if L == 0 else [(e.id,) for e in g.edges]
    by_src = {}
    for e in g.edges:
        by_src.setdefault(e.src, []).append(e)
    for _ in range(L - 1):
        paths = [p + (e.id,) for p in paths for e in by_src.get(g.edges[p[-1]].dst, [])]
    return paths


def higher_block(g: LabeledGraph, m: int) -> tuple:
    """Recode ``g`` on windows of ``2m+1`` edges.

    Vertices are edge paths of length ``2m`` and edges are paths of length
    ``2m+1``, labeled by the label of their middle edge.  ``m = 0`` returns
    ``g`` unchanged.

    Returns
    -------
    (LabeledGraph, Recoding)
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return g, Recoding(0, tuple((e.id,) for e in g.edges), tuple(e.id for e in g.edges))
    g = trim(g)
    windows = _paths_of_length(g, 2 * m + 1)

    def name(p):
        return ".".join(map(str, p)) if p else "-"

    verts = {}
    triples = []
    middle = []
    for p in windows:
        a, b = name(p[:-1]), name(p[1:])
        verts.setdefault(a, None)
        verts.setdefault(b, None)
        triples.append((a, b, g.edges[p[m]].label))
        middle.append(p[m])
    h = LabeledGraph.build(triples, alphabet=g.alphabet, vertices=list(verts))
    h = trim(h)
    # trimming keeps edge order, so filtering the windows the same way stays aligned
    alive = set(h.vertices)
    pairs = [(p, mid) for p, mid in zip(windows, middle)
             if name(p[:-1]) in alive and name(p[1:]) in alive]
    return h, Recoding(m, tuple(p for p, _ in pairs), tuple(mid for _, mid in pairs))


def restrict_to_subgraph(g: LabeledGraph, keep_vertex=None, keep_edge=None) -> LabeledGraph:
    """Labeled subgraph selected by predicates, then trimmed."""
    kv = [v for v in g.vertices if keep_vertex is None or keep_vertex(v)]
    return trim(subgraph(g, kv, keep_edge))


# ---------------------------------------------------------------------------
# shift handles

SOFIC = "SOFIC"
SFT_EDGE_SHIFT = "SFT_EDGE_SHIFT"


@dataclass(eq=False)
class ShiftHandle:
    """A sofic shift given by a presentation (``None`` means the empty shift)."""

    presentation: LabeledGraph | None
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def of(cls, g: LabeledGraph, name: str = "") -> "ShiftHandle":
        try:
            return cls(trim(g), name)
        except EmptyShiftError:
            return cls(None, name)

    @classmethod
    def empty(cls, name: str = "") -> "ShiftHandle":
        return cls(None, name)

    @property
    def is_empty(self) -> bool:
        return self.presentation is None

    @property
    def kind(self) -> str:
        g = self.presentation
        if g is not None and len({e.label for e in g.edges}) == len(g.edges):
            return SFT_EDGE_SHIFT
        return SOFIC

    @property
    def alphabet(self) -> tuple:
        return () if self.presentation is None else self.presentation.alphabet

    def is_irreducible(self) -> bool:
        return self.presentation is not None and is_irreducible(self.presentation)

    def cached(self, key, compute):
        """Compute-once cache; concurrent callers may duplicate work but never see torn values."""
        val = self._cache.get(key)
        if val is None:
            val = compute()
            with self._lock:
                val = self._cache.setdefault(key, val)
        return val

    @property
    def fischer(self):
        from .presentation import fischer_cover
        return fischer_cover(self)

    def __repr__(self):
        body = "EMPTY" if self.presentation is None else repr(self.presentation)
        return f"ShiftHandle({self.name or '?'}: {body})"


@dataclass(eq=False)
class CoverSpec:
    """A 1-block cover: the edge shift of ``graph`` mapped by its labels."""

    graph: LabeledGraph
    name: str = ""

    def __post_init__(self):
        self.graph = trim(self.graph)
        if not is_irreducible(self.graph):
            raise NotIrreducibleError("a cover needs an irreducible graph")

    @property
    def codomain(self) -> ShiftHandle:
        if not hasattr(self, "_codomain"):
            self._codomain = ShiftHandle.of(self.graph, self.name)
        return self._codomain

    @property
    def domain_graph(self) -> LabeledGraph:
        """The domain edge shift, written with distinct labels (edge ids)."""
        return self.graph.relabel(lambda e: f"e{e.id}",
                                  alphabet=[f"e{e.id}" for e in self.graph.edges])


def cycle_graph(w: Sequence[str], alphabet: Sequence[str] | None = None, prefix: str = "c") -> LabeledGraph:
    """Presentation of the single orbit of ``w^inf``: a cycle labeled ``w``."""
    w = tuple(w)
    n = len(w)
    triples = [(f"{prefix}{i}", f"{prefix}{(i + 1) % n}", w[i]) for i in range(n)]
    al = alphabet if alphabet is not None else tuple(dict.fromkeys(w))
    return LabeledGraph.build(triples, alphabet=al)


def orbit_shift(words: Iterable, alphabet: Sequence[str] | None = None, name: str = "") -> ShiftHandle:
    """Finite shift made of the orbits of the given periodic words."""
    triples = []
    for k, w in enumerate(words):
        w = tuple(w)
        triples += [(f"o{k}_{i}", f"o{k}_{(i + 1) % len(w)}", w[i]) for i in range(len(w))]
    al = alphabet if alphabet is not None else tuple(sorted({t[2] for t in triples}))
    return ShiftHandle.of(LabeledGraph.build(triples, alphabet=al), name)
