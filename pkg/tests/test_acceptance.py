"""Acceptance battery: one line per criterion, PASS or FAIL with the failing verdicts.

Thresholds, seeds and sizes live in ``subcrit.lab.experiments.THRESHOLDS``
and ``subcrit.lab.verify``; nothing here relaxes them.  Criteria 4 and 6
draw millions of graphs and take most of an hour on one core.
"""

import pytest

from subcrit.lab.verify import CRITERIA

SLOW = {4, 6}


def _report(result, capsys):
    with capsys.disabled():
        print("\n" + result.summary())
        for r in result.reports:
            for v in r.verdicts:
                mark = "ok  " if v["passed"] else "FAIL"
                print(f"    {mark} {r.experiment}/{r.cls}: {v['name']} = {v['value']} ({v['rule']} {v['threshold']})")
        for v in result.extra:
            mark = "ok  " if v["passed"] else "FAIL"
            print(f"    {mark} {v['name']} = {v['value']} ({v['rule']} {v['threshold']})")


@pytest.mark.parametrize("number", [pytest.param(k, marks=pytest.mark.slow) if k in SLOW else k
                                    for k in sorted(CRITERIA)])
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    _report(result, capsys)
    assert result.passed, result.summary()
