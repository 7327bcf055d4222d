"""Acceptance battery: every criterion at its stated tolerance.

Prints one pass/fail line per criterion; ``xpchaos scan-suite`` runs the
same battery from the command line.
"""

import pytest

from xpchaos import acceptance


@pytest.fixture(scope="module")
def results():
    return acceptance.run_all(log=None)


def _lookup(results, criterion_id):
    return next(r for r in results if r["id"] == criterion_id)


@pytest.mark.parametrize("criterion_id,name", [
    (1, "gromov exactness"),
    (2, "onb certification"),
    (3, "schoenberg psd"),
    (4, "operator identities"),
    (5, "exact p2 closures"),
    (6, "moment formulas"),
    (7, "boundedness scans"),
    (8, "even-p torus norms"),
    (9, "linear-model consistency"),
    (10, "wall-clock budget"),
])
def test_criterion(results, criterion_id, name):
    result = _lookup(results, criterion_id)
    print(acceptance.format_line(result))
    assert result["passed"], acceptance.format_line(result)
