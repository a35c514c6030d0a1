"""Command-line front end: ``soficlab <command> ...``.

Every command prints one JSON report with sorted keys.  Exit codes:
0 success or YES, 1 NO, 2 UNKNOWN, 3 error, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .core import CoverSpec, LabeledGraph, ShiftHandle, parse_presentation, serialize_presentation
from .errors import SoficError
from .verdict import EXIT_CODES, Verdict3, jsonable

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# inputs


def _load(ref: str) -> tuple:
    """(graph, sha256) for a file path or a bundled fixture name.

    A missing path falls back to the fixture with the same stem, so
    ``examples/ex_5_4.json`` works from any directory.
    """
    from .corpus import FIXTURES, fixture_text
    if os.path.exists(ref):
        with open(ref, "rb") as fh:
            raw = fh.read()
    else:
        stem = os.path.splitext(os.path.basename(ref))[0]
        if stem not in FIXTURES:
            raise FileNotFoundError(f"no such file or fixture: {ref}")
        raw = fixture_text(stem).encode("utf-8")
    return parse_presentation(raw.decode("utf-8")), hashlib.sha256(raw).hexdigest()


class _Inputs:
    def __init__(self):
        self.hashes = {}

    def graph(self, ref: str) -> LabeledGraph:
        g, h = _load(ref)
        self.hashes[ref] = h
        return g

    def shift(self, ref: str) -> ShiftHandle:
        return ShiftHandle.of(self.graph(ref), os.path.splitext(os.path.basename(ref))[0])

    def cover(self, ref: str) -> CoverSpec:
        return CoverSpec(self.graph(ref), os.path.splitext(os.path.basename(ref))[0])


def to_dot(g: LabeledGraph, name: str = "G") -> str:
    lines = [f'digraph "{name}" {{']
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for e in g.edges:
        lines.append(f'  "{e.src}" -> "{e.dst}" [label="{e.label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _write_graph(g: LabeledGraph, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(serialize_presentation(g) + "\n")


# ---------------------------------------------------------------------------
# commands; each returns (payload dict, exit code, optional graph for --format dot)


def cmd_fischer(a, io: _Inputs):
    from .presentation import cover_report, fischer_cover, left_fischer_cover
    Y = io.shift(a.graph)
    F = left_fischer_cover(Y) if a.left else fischer_cover(Y)
    _write_graph(F.graph, a.out)
    rep = cover_report(F)
    rep.update(side=F.side, graph=F.graph.to_dict())
    return rep, EXIT_OK, F.graph


def cmd_census(a, io: _Inputs):
    from .census import census, cover_census
    kw = {"budget": a.budget} if a.budget else {}
    if a.cover:
        t = cover_census(io.cover(a.graph), a.nmax, **kw)
    else:
        t = census(io.shift(a.graph), a.nmax, **kw)
    return {"table": t.to_dict(), "n_max": a.nmax}, EXIT_OK, None


def cmd_receptive(a, io: _Inputs):
    from .census import is_receptive
    from .core import as_word
    Y = io.shift(a.graph)
    ok, wit = is_receptive(Y, as_word(a.word, Y.alphabet))
    return {"word": a.word, "receptive": bool(ok), "witness": wit}, EXIT_OK, None


def cmd_period(a, io: _Inputs):
    from .period import period_of
    return period_of(io.shift(a.graph), a.nmax).to_dict(), EXIT_OK, None


def cmd_p_periodic(a, io: _Inputs):
    from .period import is_p_periodic
    v = is_p_periodic(io.shift(a.graph), a.p, k_max=a.kmax, n_max=a.nmax)
    return v.to_dict(), v.exit_code, None


def cmd_components(a, io: _Inputs):
    from .structure import component_tree
    return component_tree(io.shift(a.graph)).to_dict(), EXIT_OK, None


def cmd_decide(a, io: _Inputs):
    from .decide import DECIDERS
    Z = io.shift(a.Z)
    T = io.cover(a.target) if a.kind == "through-cover" else io.shift(a.target)
    v: Verdict3 = DECIDERS[a.kind](Z, T, n_max=a.nmax)
    out = v.to_dict()
    out["kind"] = a.kind
    if a.audit:
        from .verify import audit_verdict
        out["audit"] = audit_verdict(v, Z, a.kind, T)
    return out, v.exit_code, None


def cmd_forge(a, io: _Inputs):
    from . import forge
    if a.kind == "receptive-cover":
        res = forge.forge_receptive_cover(io.cover(a.graph), _need(a.word, "--word"))
    elif a.kind == "ai-cover":
        res = forge.forge_ai_cover(io.shift(a.graph), _need(a.word, "--word"))
    elif a.kind == "ai-sft-cover":
        res = forge.ai_sft_cover(io.shift(a.graph), _need(a.word, "--word"))
    elif a.kind == "injective-sub":
        res = forge.extract_injective_sub(io.cover(a.graph), Fraction(_need(a.eps, "--eps")))
    else:
        res = forge.grow_periodic_support(io.cover(a.graph), Fraction(_need(a.eps, "--eps")),
                                          _need(a.M, "--M"))
    _write_graph(res.graph, a.out)
    out = res.to_dict()
    out["kind"] = a.kind
    out["graph_file"] = res.graph.to_dict()
    return out, EXIT_OK, res.graph


def cmd_verify(a, io: _Inputs):
    from .verify import SubSFT, degree, finite_to_one, injective_on
    if a.kind == "equal":
        from .presentation import shifts_equal
        if len(a.graphs) != 2:
            raise UsageError("verify equal needs two graph files")
        A, B = io.shift(a.graphs[0]), io.shift(a.graphs[1])
        return {"equal": shifts_equal(A, B)}, EXIT_OK, None
    if len(a.graphs) != 1:
        raise UsageError(f"verify {a.kind} needs one cover graph")
    pi = io.cover(a.graphs[0])
    if a.kind == "injective":
        return {"injective": injective_on(pi, SubSFT.whole(pi))}, EXIT_OK, None
    if a.kind == "f2one":
        return {"finite_to_one": finite_to_one(pi)}, EXIT_OK, None
    return {"degree": degree(pi)}, EXIT_OK, None


def cmd_corpus(a, io: _Inputs):
    from . import acceptance
    if a.seed is not None:
        acceptance.AUDIT_SEED = a.seed
    results = acceptance.run_all()
    for o in results:
        print(o.line(), file=sys.stderr)
    ok = all(o.ok for o in results)
    return {"criteria": [o.to_dict() for o in results], "passed": sum(o.ok for o in results),
            "total": len(results), "all_passed": ok,
            "notes": acceptance.corpus_notes()}, EXIT_OK if ok else 1, None


def _need(value, flag):
    if value is None:
        raise UsageError(f"this command needs {flag}")
    return value


COMMANDS = {
    "fischer": cmd_fischer, "census": cmd_census, "receptive": cmd_receptive,
    "period": cmd_period, "p-periodic": cmd_p_periodic, "components": cmd_components,
    "decide": cmd_decide, "forge": cmd_forge, "verify": cmd_verify, "corpus": cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    from .decide import DECIDERS
    common = _Parser(add_help=False)
    common.add_argument("--nmax", type=int, default=8)
    common.add_argument("--kmax", type=int, default=3)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", choices=["json", "dot"], default="json")
    common.add_argument("--timing", action="store_true", help="add runtime_ms to the report")

    p = _Parser(prog="soficlab", description="Sofic shift invariants, decisions and covers.")
    p.add_argument("--version", action="version", version=f"soficlab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("fischer", parents=[common], help="Fischer cover and report")
    s.add_argument("graph")
    s.add_argument("--left", action="store_true")
    s.add_argument("--out")
    s = sub.add_parser("census", parents=[common], help="q, s, rec (and r) counts")
    s.add_argument("graph")
    s.add_argument("--cover", action="store_true", help="read the graph as a 1-block cover and add r")
    s = sub.add_parser("receptive", parents=[common], help="receptivity of w^inf")
    s.add_argument("graph")
    s.add_argument("--word", required=True)
    s = sub.add_parser("period", parents=[common], help="period report")
    s.add_argument("graph")
    s = sub.add_parser("p-periodic", parents=[common], help="p-periodicity verdict")
    s.add_argument("graph")
    s.add_argument("-p", type=int, required=True)
    s = sub.add_parser("components", parents=[common], help="derived-shift component tree")
    s.add_argument("graph")
    s = sub.add_parser("decide", parents=[common], help="embedding decisions")
    s.add_argument("kind", choices=sorted(DECIDERS))
    s.add_argument("Z")
    s.add_argument("target")
    s.add_argument("--audit", action="store_true", help="replay the certificate or witness")
    s = sub.add_parser("forge", parents=[common], help="cover constructions")
    s.add_argument("kind", choices=["receptive-cover", "ai-cover", "ai-sft-cover", "injective-sub", "grow"])
    s.add_argument("graph")
    s.add_argument("--word")
    s.add_argument("--eps")
    s.add_argument("--M", type=int)
    s.add_argument("--out")
    s = sub.add_parser("verify", parents=[common], help="cover checks")
    s.add_argument("kind", choices=["injective", "f2one", "degree", "equal"])
    s.add_argument("graphs", nargs="+")
    sub.add_parser("corpus", parents=[common], help="replay the acceptance criteria")
    return p


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    t0 = time.perf_counter()
    try:
        a = build_parser().parse_args(argv)
        if a.command is None:
            raise UsageError("soficlab: a command is required")
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    io = _Inputs()
    report = {"command": [a.command] + ([a.kind] if hasattr(a, "kind") else []),
              "schema_version": SCHEMA_VERSION, "tool_version": __version__}
    graph = None
    try:
        payload, code, graph = COMMANDS[a.command](a, io)
        for k, v in payload.items():
            report.setdefault(k, v)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (SoficError, OSError, ValueError, KeyError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_ERROR
        print(f"soficlab: {type(exc).__name__}: {exc}", file=sys.stderr)
    report["inputs"] = io.hashes
    if a.timing:
        report["runtime_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    if a.format == "dot" and graph is not None and code == EXIT_OK:
        sys.stdout.write(to_dot(graph, a.command))
    else:
        _emit(report)
    return code


def run(argv) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "run", "build_parser", "to_dot", "EXIT_CODES", "SCHEMA_VERSION"]
