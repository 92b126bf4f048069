"""The ten acceptance criteria, each at its stated tolerance and time budget.

One pass/fail line per criterion is printed and collected for the terminal
summary. The same checks back ``nonarch selftest``.
"""

import pytest

from nonarch.acceptance import CRITERIA, run_one

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"c{c.number}-{c.tags[0]}")
def test_criterion(criterion):
    outcome = run_one(criterion, seed=0)
    line = outcome.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert outcome.passed, line
