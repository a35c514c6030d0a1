"""Fixture shifts shipped with the package (the worked examples, transcribed verbatim)."""

from __future__ import annotations

from importlib import resources

from .core import LabeledGraph, ShiftHandle, parse_presentation

FIXTURES = {
    "even": "even shift",
    "golden": "golden mean shift (sofic labels 0/1)",
    "golden_sft": "golden mean edge shift (distinct labels)",
    "golden_even": "intersection of the golden mean and even shifts",
    "ex_5_4": "four-vertex shift with cycle lengths 2, 2, 4",
    "aab": "two-vertex graph with edges a, a, b",
    "full2": "full 2-shift",
    "point0": "the fixed point 0^inf",
    "points01": "two fixed points 0^inf and 1^inf",
    "orbit100": "orbit of (100)^inf",
    "cycle2": "the 2-cycle {(01)^inf, (10)^inf}",
    "g1": "vertex-labeled graph G1, source labeling",
    "g1_target": "vertex-labeled graph G1, target labeling",
    "g2": "vertex-labeled graph G2, source labeling",
}


def fixture_text(name: str) -> str:
    return resources.files(__package__).joinpath("data", f"{name}.json").read_text(encoding="utf-8")


def fixture_path(name: str):
    return resources.files(__package__).joinpath("data", f"{name}.json")


def graph(name: str) -> LabeledGraph:
    return parse_presentation(fixture_text(name))


def shift(name: str) -> ShiftHandle:
    return ShiftHandle.of(graph(name), name)


def even_shift() -> ShiftHandle:
    return shift("even")


def golden_even() -> ShiftHandle:
    return shift("golden_even")


def g1_shift() -> ShiftHandle:
    return shift("g1")


IRREDUCIBLE = ["even", "golden", "golden_sft", "golden_even", "ex_5_4", "aab", "full2",
               "point0", "orbit100", "cycle2", "g1", "g2"]
