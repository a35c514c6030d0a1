"""Acceptance suite: one [PASS]/[FAIL] line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script with
``python3 tests/test_acceptance.py``.
"""

import sys

import pytest

from soficlab.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA],
                         ids=[f"AC{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, capsys):
    outcome = run_criterion(number)
    with capsys.disabled():
        print("\n" + outcome.line(), flush=True)
    assert outcome.ok, outcome.detail


if __name__ == "__main__":
    results = [run_criterion(n) for n, _, _ in CRITERIA]
    for o in results:
        print(o.line())
    print(f"{sum(o.ok for o in results)}/{len(results)} criteria passed")
    sys.exit(0 if all(o.ok for o in results) else 1)
