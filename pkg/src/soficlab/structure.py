"""Derived shifts, closures of periodic points, and the irreducible-component tree."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import LabeledGraph, ShiftHandle, scc_decompose, subgraph, trim
from .errors import DepthBudgetExceeded, EmptyShiftError, NotContainedError
from .presentation import _name_subset, fischer_cover, shifts_equal


def derived_shift(Y: ShiftHandle) -> ShiftHandle:
    """The points of ``Y`` containing no synchronizing word (possibly EMPTY).

    Runs the subset automaton of the Fischer cover from the full vertex set
    and keeps only subsets (and transitions into subsets) of size >= 2.
    """
    if Y.is_empty:
        return ShiftHandle.empty(f"d({Y.name})")
    F = fischer_cover(Y)
    full = frozenset(range(F.n))
    seen = {full}
    q = deque([full])
    triples = []
    while q:
        S = q.popleft()
        for a in F.graph.alphabet:
            T = F.image(S, (a,))
            if len(T) < 2:
                continue
            triples.append((_name_subset(F.graph, S), _name_subset(F.graph, T), a))
            if T not in seen:
                seen.add(T)
                q.append(T)
    name = f"d({Y.name})"
    if not triples:
        return ShiftHandle.empty(name)
    g = LabeledGraph.build(triples, alphabet=F.graph.alphabet)
    return ShiftHandle.of(g, name)


def closure_of_periodic(S: ShiftHandle) -> list:
    """One irreducible shift per cycle-bearing component of the presentation, duplicates merged."""
    if S.is_empty:
        return []
    g = S.presentation
    pieces = []
    for k, comp in enumerate(c for c in scc_decompose(g) if c.cycle_bearing):
        h = ShiftHandle.of(subgraph(g, comp.vertices), f"{S.name}#{k}")
        if not any(shifts_equal(h, old) for old in pieces):
            pieces.append(h)
    return pieces


@dataclass
class ComponentRef:
    index: int
    level: int
    closure: ShiftHandle
    parent: int | None

    def to_dict(self) -> dict:
        F = fischer_cover(self.closure)
        from .census import entropy
        from .core import graph_period
        return {"index": self.index, "level": self.level, "parent": self.parent,
                "states": F.n, "period": graph_period(F.graph),
                "entropy": entropy(self.closure).to_dict()}


@dataclass
class ComponentTree:
    root: ShiftHandle
    components: list = field(default_factory=list)
    levels: dict = field(default_factory=dict)  # level -> list of derived-shift handles
    depth: int = 0

    def at_level(self, k: int) -> list:
        return [c for c in self.components if c.level == k]

    def to_dict(self) -> dict:
        return {"depth": self.depth, "components": [c.to_dict() for c in self.components]}


def component_tree(Y: ShiftHandle, depth_max: int = 16) -> ComponentTree:
    """Recursively split derived shifts into irreducible closures.

    Raises
    ------
    DepthBudgetExceeded
        When the recursion would go past ``depth_max``.
    """
    tree = ComponentTree(Y)
    tree.components.append(ComponentRef(0, 0, Y, None))
    tree.levels[0] = [Y]
    todo = deque([0])
    while todo:
        ci = todo.popleft()
        comp = tree.components[ci]
        d = derived_shift(comp.closure)
        if d.is_empty:
            continue
        level = comp.level + 1
        if level > depth_max:
            raise DepthBudgetExceeded(f"component tree deeper than {depth_max}")
        tree.levels.setdefault(level, []).append(d)
        for piece in closure_of_periodic(d):
            if any(shifts_equal(piece, c.closure) for c in tree.at_level(level)):
                continue
            ref = ComponentRef(len(tree.components), level, piece, ci)
            tree.components.append(ref)
            tree.depth = max(tree.depth, level)
            todo.append(ref.index)
    return tree


def language_included(U: ShiftHandle, C: ShiftHandle) -> bool:
    """Is every word of ``U`` a word of the irreducible shift ``C``?"""
    if U.is_empty:
        return True
    if C.is_empty:
        return False
    F = fischer_cover(C)
    g = U.presentation
    full = frozenset(range(F.n))
    start = [(i, full) for i in range(g.n)]
    seen = set(start)
    q = deque(start)
    while q:
        i, S = q.popleft()
        for _, j, a in g.succ[i]:
            T = F.image(S, (a,))
            if not T:
                return False
            if (j, T) not in seen:
                seen.add((j, T))
                q.append((j, T))
    return True


def meets_magic(U: ShiftHandle, C: ShiftHandle) -> bool:
    """Does some word of ``U`` collapse the Fischer cover of ``C`` to one vertex?"""
    F = fischer_cover(C)
    g = U.presentation
    full = frozenset(range(F.n))
    start = [(i, full) for i in range(g.n)]
    seen = set(start)
    q = deque(start)
    while q:
        i, S = q.popleft()
        for _, j, a in g.succ[i]:
            T = F.image(S, (a,))
            if len(T) == 1:
                return True
            if T and (j, T) not in seen:
                seen.add((j, T))
                q.append((j, T))
    return False


def locate_component(U: ShiftHandle, tree: ComponentTree) -> ComponentRef:
    """Deepest component whose closure contains ``U`` and whose magic words occur in ``U``."""
    if not language_included(U, tree.root):
        raise NotContainedError("U is not a subshift of the tree's root")
    best = None
    for c in tree.components:
        if language_included(U, c.closure) and meets_magic(U, c.closure):
            if best is None or c.level > best.level:
                best = c
    if best is None:
        raise NotContainedError("no component holds a synchronizing word of U")
    return best


def locating_components(U: ShiftHandle, tree: ComponentTree) -> list:
    """All components satisfying both location conditions (used to check uniqueness)."""
    return [c for c in tree.components
            if language_included(U, c.closure) and meets_magic(U, c.closure)]


__all__ = ["derived_shift", "closure_of_periodic", "ComponentRef", "ComponentTree",
           "component_tree", "language_included", "meets_magic", "locate_component",
           "locating_components", "trim", "EmptyShiftError"]
