"""One test per acceptance criterion.

Every criterion is an exact inequality or equality, so there are no
numerical tolerances to pin: the bounds are compared as Fractions. The
pinned parameters are the sweep sizes inside ``pathsearch.acceptance``
(100 seeds per grid, trees up to 64 vertices, subset inputs up to N = 14,
50 seeded base paths per blow-up base, graphs up to 6 vertices) and the
60-second runtime budget of the bisection sweep.

Each test prints a PASS/FAIL line, and the lines are repeated in the
terminal summary.
"""
import pytest

import conftest
from pathsearch import acceptance


@pytest.mark.parametrize("number", range(1, len(acceptance.CRITERIA) + 1))
def test_criterion(number):
    verdict = acceptance.CRITERIA[number - 1]()
    line = verdict.line()
    conftest.VERDICT_LINES.append(line)
    print(line)
    for d in verdict.details:
        print("    " + d)
    assert verdict.passed, "\n".join([line] + verdict.details)
